//! Population counterparts of the sample DFA / DCCA quantities.
//!
//! For jointly stationary inputs the expected per-box fluctuations are traces
//! of the kernel `K` against covariance band matrices, which collapse to
//! band sums weighted by the `alpha` coefficients. This module evaluates
//! those expectations, the finite-`m` coefficient `rho_eps(m)`, the
//! lag-`h` covariance structure of the per-box processes, asymptotic slopes
//! and the limits for linear processes.

mod asymptotics;
mod model;
mod moments;

pub mod dense;

pub use asymptotics::{asymptotic_expectation_slope, covariance_sum, rho_limit_from_linear, rho_limit_from_model};
pub use model::{linear_process_cov, CoeffSeq, CovarianceModel, LinearProcessSpec};
pub use moments::{
    assemble_gamma, expected_dcca, expected_dcca_with, expected_dfa, expected_dfa_with,
    fluctuation_covariance, fluctuation_covariance_with, rho_eps, rho_eps_with,
};

/// Which series of the pair an autocovariance quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    First,
    Second,
}

/// Target of a fluctuation-covariance evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovTarget {
    Dfa1,
    Dfa2,
    Dcca,
}

/// Which covariance matrix to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaKind {
    Auto1,
    Auto2,
    Cross,
}
