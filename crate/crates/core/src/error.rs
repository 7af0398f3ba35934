use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: length mismatches, empty inputs, out-of-range values.
    #[error("invalid input: {0}")]
    Input(String),

    /// A rate whose denominator is zero, e.g. slip rate on data without defects.
    #[error("undefined rate: {0}")]
    UndefinedRate(&'static str),

    #[error("{path}:{line}: {message}")]
    Ingestion { path: PathBuf, line: u64, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("config error: {0}")]
    Config(String),

    /// Broken internal invariant. Never the caller's fault.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("seed {seed}: {source}")]
    Seed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn ingestion(path: impl Into<PathBuf>, line: u64, msg: impl Into<String>) -> Self {
        Error::Ingestion {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Invariant(_) => true,
            Error::Seed { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}
