use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("posts dump is not well-formed near row {row}: {message}")]
    Dump { row: usize, message: String },

    #[error("{what} has format tag {found:?}, expected {expected:?}")]
    Format {
        what: &'static str,
        found: String,
        expected: &'static str,
    },

    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid session state: {0}")]
    State(String),

    #[error("document conflict: {0}")]
    Conflict(String),

    #[error("duplicate task text {0:?}; merge tasks before building an index")]
    DuplicateTask(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
