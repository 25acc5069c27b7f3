use thiserror::Error;

use crate::setsystem::{ElementId, SetId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the engine, the file parsers and the harness.
///
/// Element and set ids inside messages are 1-based so they line up with the
/// instance and sequence files.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance has no elements")]
    NoElements,

    #[error("element {} is not contained in any candidate set", .0 + 1)]
    Uncoverable(ElementId),

    #[error("element {} inserted while already active", .0 + 1)]
    DuplicateInsert(ElementId),

    #[error("element {} deleted while not active", .0 + 1)]
    PhantomDelete(ElementId),

    #[error("element id {id} out of range (instance has {n} elements)", id = .0 + 1, n = .1)]
    UnknownElement(ElementId, usize),

    #[error("set id {id} out of range (instance has {n} sets)", id = .0 + 1, n = .1)]
    UnknownSet(SetId, usize),

    #[error("insertion would exceed the declared capacity of {0} active elements")]
    CapacityExceeded(usize),

    #[error("beta must be a finite real greater than 1, got {0}")]
    InvalidBeta(f64),

    #[error("beta must lie in (1,2) for robust algorithm, got {0}")]
    RobustBeta(f64),

    #[error("count must be positive")]
    ZeroCount,

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("sequence has zero steps")]
    EmptySequence,

    #[error("sequence does not fit the instance: {0}")]
    SequenceMismatch(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Metrics(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
