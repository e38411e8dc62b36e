//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while configuring, evolving, measuring or
/// certifying a run.
#[derive(Debug, Error)]
pub enum Error {
    /// Initial data does not vanish beyond its declared support radius, or
    /// the support does not fit inside the grid.
    #[error("unsupported data: {0}")]
    UnsupportedData(String),

    /// The grid (or snapshot cadence) is too coarse to represent the request.
    #[error("resolution: {0}")]
    Resolution(String),

    /// Data support plus integration time would reach the outer boundary.
    #[error("cone violation: {0}")]
    ConeViolation(String),

    /// The field exceeded the overflow threshold (numerical or genuine blow-up).
    #[error("overflow: max|v| exceeded {threshold:e} at t = {t}")]
    Overflow { t: f64, threshold: f64 },

    /// A diagnostics window does not lie on the recorded snapshot times.
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    /// A ratio was requested with a vanishing denominator.
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// A certificate does not belong to the trajectory it is checked against.
    #[error("mismatch: {0}")]
    CertificateMismatch(String),

    /// A file is not in the documented dump/report/certificate format.
    #[error("format: {0}")]
    Format(String),

    /// A configuration value is invalid; `path` names the offending key.
    #[error("config: {path}: {msg}")]
    Config { path: String, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: &str, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.to_string(),
            msg: msg.into(),
        }
    }
}
