#ifndef SETCOVER_H
#define SETCOVER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SC_ALGO_ROBUST 0

#define SC_ALGO_LOCAL 1

#define SC_ALGO_PARTIAL 2

#define SC_ALGO_GLOBAL 3

#define SC_ALGO_NAIVE 4

#define SC_OP_INSERT 0

#define SC_OP_DELETE 1

/**
 * Result code of every fallible call.
 */
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_ARGUMENT = 1,
  SC_STATUS_INVALID_UTF8 = 2,
  SC_STATUS_PARSE = 3,
  SC_STATUS_INVALID_BETA = 4,
  SC_STATUS_UNKNOWN_ALGORITHM = 5,
  /**
   * Duplicate insert, phantom delete or unknown element.
   */
  SC_STATUS_BAD_UPDATE = 6,
  SC_STATUS_CAPACITY_EXCEEDED = 7,
  /**
   * The output buffer was too small; the required length was stored.
   */
  SC_STATUS_BUFFER_TOO_SMALL = 8,
  SC_STATUS_INDEX_OUT_OF_RANGE = 9,
  SC_STATUS_INVARIANT = 10,
  SC_STATUS_PANIC = 11,
  SC_STATUS_OTHER = 12,
} ScStatus;

/**
 * A dynamic cover maintainer bound to one system.
 */
typedef struct ScEngine ScEngine;

/**
 * An update sequence.
 */
typedef struct ScSequence ScSequence;

/**
 * A parsed instance.
 */
typedef struct ScSystem ScSystem;

/**
 * What one update did.
 */
typedef struct ScStepReport {
  size_t cover_size;
  size_t recourse;
  bool rebuild_fired;
} ScStepReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *sc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sc_version(void);

/**
 * Parses an instance in the text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string, `out` a valid pointer.
 */
enum ScStatus sc_system_parse(const char *src, struct ScSystem **out);

/**
 * # Safety
 * `sys` must come from [`sc_system_parse`] or be null.
 */
void sc_system_free(struct ScSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle.
 */
size_t sc_system_num_elements(const struct ScSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle.
 */
size_t sc_system_num_sets(const struct ScSystem *sys);

/**
 * Generates the update sequence for `sys` with the given seed.
 *
 * # Safety
 * `sys` must be a live handle, `out` a valid pointer.
 */
enum ScStatus sc_sequence_dynamize(const struct ScSystem *sys,
                                   uint64_t seed,
                                   struct ScSequence **out);

/**
 * Parses a sequence in the text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string, `out` a valid pointer.
 */
enum ScStatus sc_sequence_parse(const char *src, struct ScSequence **out);

/**
 * # Safety
 * `seq` must be a live handle or null.
 */
size_t sc_sequence_len(const struct ScSequence *seq);

/**
 * # Safety
 * `seq` must be a live handle or null.
 */
size_t sc_sequence_capacity(const struct ScSequence *seq);

/**
 * Reads step `index` as an `SC_OP_*` code and a 0-based element id.
 *
 * # Safety
 * `seq` must be a live handle; `op` and `element` valid pointers.
 */
enum ScStatus sc_sequence_step(const struct ScSequence *seq,
                               size_t index,
                               uint32_t *op,
                               uint32_t *element);

/**
 * Writes the sequence in the text format into `buf`.
 *
 * Stores the byte length (without the terminating NUL) in `*len`. Returns
 * [`ScStatus::BufferTooSmall`] when `buf_len` cannot hold it plus the NUL;
 * `buf` may be null to query the length.
 *
 * # Safety
 * `seq` must be a live handle, `len` valid, `buf` writable for `buf_len`.
 */
enum ScStatus sc_sequence_to_text(const struct ScSequence *seq,
                                  char *buf,
                                  size_t buf_len,
                                  size_t *len);

/**
 * # Safety
 * `seq` must come from this library or be null.
 */
void sc_sequence_free(struct ScSequence *seq);

/**
 * Creates an empty maintainer. The engine keeps its own reference to the
 * system, so `sys` may be freed afterwards.
 *
 * # Safety
 * `sys` must be a live handle, `out` a valid pointer.
 */
enum ScStatus sc_engine_new(const struct ScSystem *sys,
                            uint32_t algo,
                            double beta,
                            size_t capacity,
                            struct ScEngine **out);

/**
 * # Safety
 * `engine` must come from [`sc_engine_new`] or be null.
 */
void sc_engine_free(struct ScEngine *engine);

/**
 * Activates `element`. `report` may be null.
 *
 * # Safety
 * `engine` must be a live handle; `report` valid or null.
 */
enum ScStatus sc_engine_insert(struct ScEngine *engine,
                               uint32_t element,
                               struct ScStepReport *report);

/**
 * Deactivates `element`. `report` may be null.
 *
 * # Safety
 * `engine` must be a live handle; `report` valid or null.
 */
enum ScStatus sc_engine_delete(struct ScEngine *engine,
                               uint32_t element,
                               struct ScStepReport *report);

/**
 * # Safety
 * `engine` must be a live handle or null.
 */
size_t sc_engine_cover_size(const struct ScEngine *engine);

/**
 * Copies the cover (ascending set ids) into `buf` and its length into
 * `*len`; [`ScStatus::BufferTooSmall`] if `buf_len < *len`.
 *
 * # Safety
 * `engine` must be a live handle, `len` valid, `buf` writable for `buf_len`.
 */
enum ScStatus sc_engine_cover(const struct ScEngine *engine,
                              uint32_t *buf,
                              size_t buf_len,
                              size_t *len);

/**
 * Recomputes every invariant of the maintainer.
 *
 * # Safety
 * `engine` must be a live handle.
 */
enum ScStatus sc_engine_check(const struct ScEngine *engine);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SETCOVER_H */
