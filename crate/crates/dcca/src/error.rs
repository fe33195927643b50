//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Box too small for the requested fit: every box needs at least one
    /// residual degree of freedom, i.e. `m >= nu + 2`.
    #[error("invalid box geometry: m={m} must be at least nu+2 (nu={nu})")]
    InvalidGeometry { m: usize, nu: usize },

    /// Detrending order above the supported cap (Vandermonde conditioning).
    #[error("detrending order nu={nu} exceeds the supported maximum {max}")]
    OrderCap { nu: usize, max: usize },

    /// Closed forms exist only for order-zero detrending.
    #[error("closed-form coefficients are only available for nu=0 (got nu={nu})")]
    UnsupportedOrder { nu: usize },

    #[error("index {index} out of range (maximum {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("empty input series")]
    EmptyInput,

    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series of length {n} too short for box parameter m={m} (needs at least m+1 points)")]
    SeriesTooShort { n: usize, m: usize },

    /// The covariance model cannot supply a required lag.
    #[error("covariance model cannot supply lag {lag}")]
    LagUnavailable { lag: i64 },

    /// A detrended variance vanished where a ratio needs it strictly positive.
    #[error("degenerate variance: detrended variance is not strictly positive")]
    DegenerateVariance,

    #[error("assembled covariance matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// Covariance tail mass failed to vanish within the scan horizon.
    #[error("covariance sequence not summable within the scan horizon of {horizon} lags")]
    NonSummable { horizon: usize },

    #[error("dense evaluation size {size} exceeds the configured cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter { reason: reason.into() }
    }
}
