use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: malformed row {row}: {reason}")]
    MalformedRow {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid box scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid moment grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("box size {size} does not divide series length {len}")]
    NonDivisor { size: usize, len: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate scatter: {0}")]
    DegenerateScatter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
