//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by series construction, fitting, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A time in hours fell outside the span of the series.
    #[error("time {hours} h is outside the series span [{lo}, {hi}] h")]
    OutOfSpan { hours: f64, lo: f64, hi: f64 },

    /// A series or window failed a structural invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A fit was requested on a segment with too few observations.
    #[error("insufficient data: needed {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A linear solve or factorization failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An estimator failed to produce any admissible candidate.
    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the environment (files, streams) rather
    /// than by the data or the model.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
