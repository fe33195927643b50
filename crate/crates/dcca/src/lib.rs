//! Detrended fluctuation analysis (DFA) and detrended cross-correlation
//! analysis (DCCA) for trend-stationary time series.
//!
//! The crate covers both sides of the method:
//!
//! - **Sample estimators** ([`estimator`]): integrated profiles, per-box
//!   polynomial detrending of any order up to [`detrend::MAX_ORDER`],
//!   overlapping and non-overlapping boxes, and the detrended correlation
//!   coefficient `rho_DCCA(m)`.
//! - **Population theory** ([`theory`]): exact expectations, variances and
//!   covariances of the per-box fluctuations via trace identities against the
//!   kernel `K = J'QJ`, the finite-`m` coefficient `rho_eps(m)`, asymptotic
//!   slopes and limits for linear processes.
//! - **Simulation** ([`simulate`]) and a deterministic, seedable
//!   [`montecarlo`] harness for replication studies.
//!
//! Numeric kernels are generic over the scalar type (see [`scalar::Scalar`]);
//! the simulators, the Monte Carlo harness and the type aliases at the crate
//! root are pinned to `f64`.

pub mod detrend;
pub mod error;
pub mod estimator;
pub mod montecarlo;
pub mod scalar;
pub mod simulate;
pub mod theory;

pub use detrend::{BoxGeometry, BoxMode};
pub use error::{Error, Result};

/// `f64` instantiations of the generic core types.
pub type DetrendOperators64 = detrend::DetrendOperators<f64>;
pub type AlphaCoefficients64 = detrend::AlphaCoefficients<f64>;
pub type SeriesPair64 = estimator::SeriesPair<f64>;
pub type PerBoxSeries64 = estimator::PerBoxSeries<f64>;
pub type FluctuationProfile64 = estimator::FluctuationProfile<f64>;
pub type CovarianceModel64 = theory::CovarianceModel<f64>;
pub type LinearProcessSpec64 = theory::LinearProcessSpec<f64>;

/// `f32` instantiations, mostly useful to keep the kernels honest about
/// staying scalar-generic.
pub type DetrendOperators32 = detrend::DetrendOperators<f32>;
pub type AlphaCoefficients32 = detrend::AlphaCoefficients<f32>;
