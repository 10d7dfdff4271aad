//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input to a graph or vector operation (length or index).
    #[error("structural error: {0}")]
    Structural(String),

    /// A documented precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Data too degenerate to fit (singular covariance, non-positive
    /// residual variance).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Invalid run configuration (sample sizes, rates, thresholds).
    #[error("configuration error: {0}")]
    Config(String),

    /// Operation refused because the instance is out of supported range.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Text input (CSV, constraints file, edge list) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// ROC rates are undefined (no positives or no negatives).
    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    /// Too many subsets failed for the run to be trustworthy.
    #[error("run quality: {0}")]
    RunQuality(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
