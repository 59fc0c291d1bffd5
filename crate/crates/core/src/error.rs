use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("moment generating function diverges at t = {t} (tail index {beta})")]
    Divergent { t: f64, beta: f64 },
    #[error("unsupported tail: {0}")]
    UnsupportedTail(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("operation requires regime {expected}, found {found}")]
    Regime { expected: String, found: String },
    #[error("instance too large: {0}")]
    Size(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("coefficient row {row} has negative entry {value:e} (row max {row_max:e})")]
    Nonnegativity { row: usize, value: f64, row_max: f64 },
    #[error("site {site} coincides with a cell representative; jitter the representative or the site")]
    SingularCoefficient { site: usize },
    #[error("estimate undefined: {0}")]
    Undefined(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
