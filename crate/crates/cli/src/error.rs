use std::path::{Path, PathBuf};

use thiserror::Error;
use ttm_core::Error as CoreError;
use ttm_session::SessionError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input. Exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// Well-formed input the method rejects, such as an inconsistent matrix.
    /// Exit code 1.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Classifies a library error raised while processing `context`.
    pub fn core(context: &str, err: CoreError) -> Self {
        let message = format!("{context}: {err}");
        match err {
            CoreError::Parse { .. }
            | CoreError::NotSquare { .. }
            | CoreError::MalformedMatchMatrix(_)
            | CoreError::TooFewObjects
            | CoreError::EmptyName
            | CoreError::DuplicateName(_)
            | CoreError::UnknownName(_)
            | CoreError::ObjectOutOfRange(_) => CliError::Usage(message),
            _ => CliError::Domain(message),
        }
    }

    pub fn session(context: &str, err: SessionError) -> Self {
        match err {
            SessionError::Domain(e) => Self::core(context, e),
            SessionError::Schema { .. } | SessionError::InvalidId(_) => CliError::Usage(format!("{context}: {err}")),
            other => CliError::Domain(format!("{context}: {other}")),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
