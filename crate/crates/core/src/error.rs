use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("non-numeric value {value:?} at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("response value {value:?} at row {row} is not 0 or 1")]
    InvalidResponse { row: usize, value: String },

    #[error("non-finite value at row {row}, column `{column}`")]
    NonFinite { row: usize, column: String },

    #[error("dataset already has an intercept column")]
    InterceptPresent,

    #[error("column `{0}` is constant and cannot be scaled")]
    ConstantColumn(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite (leading minor {minor} fails)")]
    NotPositiveDefinite { minor: usize },

    #[error("linear program failed during {stage}: {reason}")]
    LpFailure { stage: &'static str, reason: String },

    #[error("chain {chain} diverged at iteration {iteration}: {reason} (beta = {snapshot:?})")]
    Diverged {
        chain: usize,
        iteration: usize,
        reason: String,
        snapshot: Vec<f64>,
    },

    #[error("series is constant{}", column.as_ref().map(|c| format!(" (column `{c}`)")).unwrap_or_default())]
    ConstantSeries { column: Option<String> },

    #[error("standardization record does not match the data: {0}")]
    RecordMismatch(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("malformed draws file: {0}")]
    MalformedDraws(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
