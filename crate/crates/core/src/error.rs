use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not feasible for the constraint set")]
    Infeasible,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// A line search was handed a direction that is not a descent direction.
    #[error("line search requires a negative slope, got {slope:e}")]
    NotDescent { slope: f64 },

    #[error("line search failed after {backtracks} backtracks")]
    LineSearchFailure { backtracks: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing iteration trace (run with trace retention enabled)")]
    MissingTrace,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
