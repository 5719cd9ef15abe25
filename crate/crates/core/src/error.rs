//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A corpus row failed to parse or violated a record invariant.
    /// `row` is the 1-based data row number (header excluded).
    #[error("row {row}: field {field}: {message}")]
    ParseRow {
        row: usize,
        field: String,
        message: String,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// The design matrix is numerically rank deficient.
    #[error("rank-deficient design: column '{column}' is (nearly) collinear with the others")]
    RankDeficient { column: String },

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Constant response with nonzero residuals: no meaningful R².
    #[error("degenerate response: constant response vector with nonzero residuals")]
    DegenerateResponse,

    /// A leverage of one makes the HC3 weight undefined.
    #[error("perfect-leverage point at row {row} (h = 1)")]
    PerfectLeverage { row: usize },

    /// A rescaling denominator is missing for some (year, SC) cell.
    #[error("baseline unavailable: year={year} sc={sc} t={t}")]
    BaselineUnavailable { year: i32, sc: String, t: usize },

    #[error("subject category '{sc}' missing from the macro-area map")]
    UnmappedSubjectCategory { sc: String },

    #[error("summary requires a single time window")]
    MixedWindows,

    #[error("fewer cited observations ({cited}) than requested quantiles ({q})")]
    TooFewCited { cited: usize, q: usize },
}

impl Error {
    /// Process exit code class: 2 for validation problems, 3 for
    /// computation degeneracies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RankDeficient { .. }
            | Error::DegenerateResponse
            | Error::PerfectLeverage { .. }
            | Error::BaselineUnavailable { .. }
            | Error::TooFewCited { .. } => 3,
            _ => 2,
        }
    }

    /// Short machine-readable kind tag used in error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParseRow { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::DegenerateResponse => "degenerate-response",
            Error::PerfectLeverage { .. } => "perfect-leverage",
            Error::BaselineUnavailable { .. } => "baseline-unavailable",
            Error::UnmappedSubjectCategory { .. } => "unmapped-sc",
            Error::MixedWindows => "mixed-windows",
            Error::TooFewCited { .. } => "too-few-cited",
        }
    }
}
