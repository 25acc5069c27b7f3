//! Fully dynamic set cover.
//!
//! A [`SetSystem`] fixes the family of sets; elements are switched on and
//! off by an [`UpdateSequence`] and a [`DynamicCover`] maintainer keeps a
//! cover of the active elements. The maintainers share the level bookkeeping
//! in [`levels`] and the relaxed greedy in [`greedy`].

pub mod algo;
pub mod bench;
pub mod dynamizer;
pub mod error;
pub mod greedy;
pub mod levels;
pub mod oracle;
pub mod setsystem;
pub mod synth;

pub use algo::{Algorithm, DynamicCover, StepReport};
pub use dynamizer::{dynamize, validate_sequence, Op, UpdateSequence, UpdateStep};
pub use error::{Error, Result};
pub use greedy::{static_greedy, GreedyOutcome};
pub use levels::{check_properties, cover_of, level_of_size, LevelState, PropertyReport};
pub use oracle::{opt_cover, OracleBudget};
pub use setsystem::{frequency_of, load_instance, ElementId, SetId, SetSystem};
