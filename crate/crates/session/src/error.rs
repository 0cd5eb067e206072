use thiserror::Error;

use crate::session::Phase;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Domain(#[from] ttm_core::Error),
    #[error("operation not allowed in phase {actual:?}")]
    WrongPhase { actual: Phase },
    #[error("session `{0}` not found")]
    NotFound(String),
    #[error("invalid session id `{0}`")]
    InvalidId(String),
    #[error("version conflict: expected {expected}, stored {stored}")]
    VersionConflict { expected: u64, stored: u64 },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("storage error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SessionError> = std::result::Result<T, E>;
