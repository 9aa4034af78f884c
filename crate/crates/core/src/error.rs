use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: parse error: {message}")]
    Parse { context: String, message: String },

    /// A record or input violates one of its type invariants.
    #[error("record {record}: {field}: {message}")]
    InvalidRecord {
        record: String,
        field: String,
        message: String,
    },

    #[error("invalid argument `{name}`: {message}")]
    InvalidArgument { name: &'static str, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    #[error("row-id mismatch: {0}")]
    RowIdMismatch(String),

    #[error("unsupported wav: {0}")]
    UnsupportedWav(String),

    #[error("signal too short: {samples} samples, window needs {window}")]
    SignalTooShort { samples: usize, window: usize },

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("{0}")]
    Data(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            message: message.into(),
        }
    }
}
