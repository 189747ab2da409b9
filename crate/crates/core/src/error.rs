use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid sentence pair {id}: {reason}")]
    InvalidPair { id: usize, reason: String },

    #[error("invalid synthetic corpus parameters: {0}")]
    InvalidParams(String),

    #[error("invalid batching config: {0}")]
    InvalidConfig(String),

    #[error("a batch must contain at least one pair")]
    EmptyBatch,

    #[error("batch stream is empty")]
    EmptyStream,

    #[error("unknown metric tag `{0}`")]
    UnknownMetric(String),

    #[error("series of length {len} is too short for max lag {max_lag} (need more than {})", max_lag + 2)]
    SeriesTooShort { len: usize, max_lag: usize },

    #[error("cycle analysis requires partial_sort, got {0}")]
    PolicyMismatch(String),

    #[error("reports are not comparable: {0}")]
    Incomparable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the underlying file system rather than of the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}
