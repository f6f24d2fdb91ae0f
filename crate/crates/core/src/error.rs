use thiserror::Error;

/// Errors raised by the thickness toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid system of balls: {0}")]
    InvalidSystem(String),

    #[error("no node at word {0}")]
    UnknownWord(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("search exhausted: {0}")]
    Exhausted(String),

    #[error("step limit of {0} exceeded")]
    StepLimit(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
