use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = BcsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BcsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("non-numeric cell at row {row}, column `{column}`: {value:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("Cholesky factorization failed for block starting at coordinate {start}")]
    Cholesky { start: usize },

    #[error("non-finite chain state at sweep {sweep}: {what}")]
    ChainDiverged { sweep: usize, what: String },

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),

    #[error("design restricted to the support is rank deficient")]
    RankDeficient,

    #[error("all {0} grid points failed")]
    AllGridPointsFailed(usize),

    #[error("inconsistent persisted result: {0}")]
    Inconsistent(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("JSON error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl BcsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BcsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        BcsError::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        BcsError::Json {
            path: path.into(),
            source,
        }
    }
}
