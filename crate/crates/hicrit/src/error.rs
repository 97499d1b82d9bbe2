use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-range input data.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error(transparent)]
    Core(#[from] hicrit_core::Error),

    #[error("cache miss: {0}")]
    CacheMiss(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 3 for bad input, 4 for a cache miss.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CacheMiss(_) => 4,
            _ => 3,
        }
    }
}
