use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible extrinsic spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("lens range is degenerate (all values equal) with resolution {0} > 1")]
    DegenerateRange(usize),

    #[error("intrinsic metric is unbounded: network has {0} connected components")]
    Disconnected(usize),

    #[error("solver did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), message: message.into() }
    }

    /// True for errors caused by the caller's data or files rather than by
    /// the library itself.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::NotConverged(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
