use thiserror::Error;

/// Errors raised by the geometric and combinatorial routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unsupported input (bad pin, wrong dimension, bad JSON field).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A configuration left general position: coincident points, empty meets, zero denominators.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// A requested operation does not apply to the data (missing rows, window too small).
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A verification routine found a counterexample.
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CheckFailed(_) => 1,
            Error::Degenerate(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn degenerate<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Degenerate(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
