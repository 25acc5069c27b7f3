//! C ABI over the set cover engine.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_parse` call and released by the matching `*_free`. Fallible
//! calls return an [`ScStatus`]; the message for the last failure on the
//! calling thread is available from [`sc_last_error_message`].
//!
//! Element and set ids are 0-based here, unlike the 1-based text formats.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use setcover::{dynamize, load_instance, Algorithm, DynamicCover, Error, Op, SetSystem, UpdateSequence, UpdateStep};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidBeta = 4,
    UnknownAlgorithm = 5,
    /// Duplicate insert, phantom delete or unknown element.
    BadUpdate = 6,
    CapacityExceeded = 7,
    /// The output buffer was too small; the required length was stored.
    BufferTooSmall = 8,
    IndexOutOfRange = 9,
    Invariant = 10,
    Panic = 11,
    Other = 12,
}

pub const SC_ALGO_ROBUST: u32 = 0;
pub const SC_ALGO_LOCAL: u32 = 1;
pub const SC_ALGO_PARTIAL: u32 = 2;
pub const SC_ALGO_GLOBAL: u32 = 3;
pub const SC_ALGO_NAIVE: u32 = 4;

pub const SC_OP_INSERT: u32 = 0;
pub const SC_OP_DELETE: u32 = 1;

/// A parsed instance.
pub struct ScSystem(Arc<SetSystem>);

/// An update sequence.
pub struct ScSequence(UpdateSequence);

/// A dynamic cover maintainer bound to one system.
pub struct ScEngine(Box<dyn DynamicCover>);

/// What one update did.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScStepReport {
    pub cover_size: usize,
    pub recourse: usize,
    pub rebuild_fired: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> ScStatus {
    match err {
        Error::Parse { .. } | Error::NoElements | Error::EmptySequence => ScStatus::Parse,
        Error::InvalidBeta(_) | Error::RobustBeta(_) => ScStatus::InvalidBeta,
        Error::DuplicateInsert(_) | Error::PhantomDelete(_) | Error::UnknownElement(..) => {
            ScStatus::BadUpdate
        }
        Error::CapacityExceeded(_) => ScStatus::CapacityExceeded,
        Error::Invariant(_) => ScStatus::Invariant,
        Error::AtStep { source, .. } => status_of(source),
        _ => ScStatus::Other,
    }
}

fn fail(status: ScStatus, msg: impl Into<String>) -> ScStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> ScStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `f`, turning a panic into [`ScStatus::Panic`].
fn guard(f: impl FnOnce() -> ScStatus) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(ScStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, ScStatus> {
    if s.is_null() {
        return Err(fail(ScStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ScStatus::InvalidUtf8, "string argument is not UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(ScStatus::NullArgument, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------------------
// Systems

/// Parses an instance in the text format.
///
/// # Safety
/// `src` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_system_parse(src: *const c_char, out: *mut *mut ScSystem) -> ScStatus {
    guard(|| {
        non_null!(out);
        let src = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match load_instance(src) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(ScSystem(Arc::new(sys))));
                ScStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `sys` must come from [`sc_system_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sc_system_free(sys: *mut ScSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_system_num_elements(sys: *const ScSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.num_elements())
}

/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_system_num_sets(sys: *const ScSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.num_sets())
}

// ---------------------------------------------------------------------------
// Sequences

/// Generates the update sequence for `sys` with the given seed.
///
/// # Safety
/// `sys` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_dynamize(
    sys: *const ScSystem,
    seed: u64,
    out: *mut *mut ScSequence,
) -> ScStatus {
    guard(|| {
        non_null!(sys, out);
        match dynamize(&(*sys).0, seed) {
            Ok(seq) => {
                *out = Box::into_raw(Box::new(ScSequence(seq)));
                ScStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Parses a sequence in the text format.
///
/// # Safety
/// `src` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_parse(src: *const c_char, out: *mut *mut ScSequence) -> ScStatus {
    guard(|| {
        non_null!(out);
        let src = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match UpdateSequence::parse(src) {
            Ok(seq) => {
                *out = Box::into_raw(Box::new(ScSequence(seq)));
                ScStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_len(seq: *const ScSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.steps.len())
}

/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_capacity(seq: *const ScSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.n_cap)
}

/// Reads step `index` as an `SC_OP_*` code and a 0-based element id.
///
/// # Safety
/// `seq` must be a live handle; `op` and `element` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_step(
    seq: *const ScSequence,
    index: usize,
    op: *mut u32,
    element: *mut u32,
) -> ScStatus {
    guard(|| {
        non_null!(seq, op, element);
        let steps = &(*seq).0.steps;
        let Some(step) = steps.get(index) else {
            return fail(
                ScStatus::IndexOutOfRange,
                format!("step {index} out of range ({} steps)", steps.len()),
            );
        };
        *op = match step.op {
            Op::Insert => SC_OP_INSERT,
            Op::Delete => SC_OP_DELETE,
        };
        *element = step.element;
        ScStatus::Ok
    })
}

/// Writes the sequence in the text format into `buf`.
///
/// Stores the byte length (without the terminating NUL) in `*len`. Returns
/// [`ScStatus::BufferTooSmall`] when `buf_len` cannot hold it plus the NUL;
/// `buf` may be null to query the length.
///
/// # Safety
/// `seq` must be a live handle, `len` valid, `buf` writable for `buf_len`.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_to_text(
    seq: *const ScSequence,
    buf: *mut c_char,
    buf_len: usize,
    len: *mut usize,
) -> ScStatus {
    guard(|| {
        non_null!(seq, len);
        let text = (*seq).0.to_text();
        *len = text.len();
        if buf.is_null() || buf_len < text.len() + 1 {
            return fail(ScStatus::BufferTooSmall, format!("need {} bytes", text.len() + 1));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast(), text.len());
        *buf.add(text.len()) = 0;
        ScStatus::Ok
    })
}

/// # Safety
/// `seq` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sc_sequence_free(seq: *mut ScSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

// ---------------------------------------------------------------------------
// Engines

fn algorithm(code: u32) -> Option<Algorithm> {
    Some(match code {
        SC_ALGO_ROBUST => Algorithm::Robust,
        SC_ALGO_LOCAL => Algorithm::Local,
        SC_ALGO_PARTIAL => Algorithm::Partial,
        SC_ALGO_GLOBAL => Algorithm::Global,
        SC_ALGO_NAIVE => Algorithm::Naive,
        _ => return None,
    })
}

/// Creates an empty maintainer. The engine keeps its own reference to the
/// system, so `sys` may be freed afterwards.
///
/// # Safety
/// `sys` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_new(
    sys: *const ScSystem,
    algo: u32,
    beta: f64,
    capacity: usize,
    out: *mut *mut ScEngine,
) -> ScStatus {
    guard(|| {
        non_null!(sys, out);
        let Some(algo) = algorithm(algo) else {
            return fail(ScStatus::UnknownAlgorithm, format!("unknown algorithm code {algo}"));
        };
        if let Err(e) = algo.check_beta(beta) {
            return from_error(e);
        }
        match algo.build(Arc::clone(&(*sys).0), beta, capacity) {
            Ok(engine) => {
                *out = Box::into_raw(Box::new(ScEngine(engine)));
                ScStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `engine` must come from [`sc_engine_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_free(engine: *mut ScEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

unsafe fn apply(engine: *mut ScEngine, step: UpdateStep, report: *mut ScStepReport) -> ScStatus {
    guard(|| {
        non_null!(engine);
        match (*engine).0.update(step) {
            Ok(r) => {
                if !report.is_null() {
                    *report = ScStepReport {
                        cover_size: r.cover_size,
                        recourse: r.recourse,
                        rebuild_fired: r.rebuild_fired,
                    };
                }
                ScStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Activates `element`. `report` may be null.
///
/// # Safety
/// `engine` must be a live handle; `report` valid or null.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_insert(engine: *mut ScEngine, element: u32, report: *mut ScStepReport) -> ScStatus {
    apply(engine, UpdateStep::insert(element), report)
}

/// Deactivates `element`. `report` may be null.
///
/// # Safety
/// `engine` must be a live handle; `report` valid or null.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_delete(engine: *mut ScEngine, element: u32, report: *mut ScStepReport) -> ScStatus {
    apply(engine, UpdateStep::delete(element), report)
}

/// # Safety
/// `engine` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_cover_size(engine: *const ScEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.0.cover_size())
}

/// Copies the cover (ascending set ids) into `buf` and its length into
/// `*len`; [`ScStatus::BufferTooSmall`] if `buf_len < *len`.
///
/// # Safety
/// `engine` must be a live handle, `len` valid, `buf` writable for `buf_len`.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_cover(
    engine: *const ScEngine,
    buf: *mut u32,
    buf_len: usize,
    len: *mut usize,
) -> ScStatus {
    guard(|| {
        non_null!(engine, len);
        let cover = (*engine).0.cover();
        *len = cover.len();
        if cover.len() > buf_len || (buf.is_null() && !cover.is_empty()) {
            return fail(ScStatus::BufferTooSmall, format!("cover has {} sets", cover.len()));
        }
        if !cover.is_empty() {
            ptr::copy_nonoverlapping(cover.as_ptr(), buf, cover.len());
        }
        ScStatus::Ok
    })
}

/// Recomputes every invariant of the maintainer.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_check(engine: *const ScEngine) -> ScStatus {
    guard(|| {
        non_null!(engine);
        match (*engine).0.check() {
            Ok(()) => ScStatus::Ok,
            Err(msg) => fail(ScStatus::Invariant, msg),
        }
    })
}
