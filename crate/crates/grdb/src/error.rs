//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrdbError {
    /// Rejected input: violated precondition or unparsable data.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An exact cross-check failed; indicates a bug or inconsistent inputs.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
}

impl GrdbError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        GrdbError::Invalid(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        GrdbError::Inconsistency(msg.into())
    }
}
