use thiserror::Error;

use crate::syntax::FormulaPair;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("formula has {vars} distinct letters; at most {bound} can be enumerated")]
    Capacity { vars: usize, bound: usize },

    #[error("override adds and removes the same pair {0}")]
    OverlappingOverride(FormulaPair),

    #[error("universe is not closed under subformulas: {0} is missing")]
    UniverseNotClosed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("condition cannot be decided on this relation representation")]
    Undecidable,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
