//! Large-box asymptotics and limits.

use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};
use crate::theory::model::{CovarianceModel, LinearProcessSpec};
use crate::theory::{Component, CovTarget, GammaKind};

/// Scan horizon for models that do not declare a finite support.
const SCAN_HORIZON: usize = 1 << 16;
/// Tail fraction below which the scanned sum is accepted.
const TAIL_FRACTION: f64 = 1e-9;

/// `sum_{h in Z} gamma(h)` for the requested covariance.
///
/// Models with a declared support are summed exactly over it; otherwise lags
/// are scanned in blocks until the tail contribution falls below a fixed
/// fraction of the running total, failing with `NonSummable` at the horizon.
pub fn covariance_sum<T: Scalar>(model: &CovarianceModel<T>, kind: GammaKind) -> Result<T> {
    let at = |h: i64| -> Result<T> {
        match kind {
            GammaKind::Auto1 => model.gamma_auto(Component::First, h),
            GammaKind::Auto2 => model.gamma_auto(Component::Second, h),
            GammaKind::Cross => model.gamma_cross(h),
        }
    };
    if let Some(s) = model.support() {
        let mut acc = at(0)?;
        for h in 1..=s as i64 {
            acc += at(h)? + at(-h)?;
        }
        return Ok(acc);
    }
    let mut acc = at(0)?;
    let mut scale = acc.abs();
    let block = 64usize;
    let mut h = 1usize;
    while h <= SCAN_HORIZON {
        let mut block_sum = T::zero();
        let mut block_abs = T::zero();
        for k in h..(h + block) {
            let v = at(k as i64)? + at(-(k as i64))?;
            block_sum += v;
            block_abs += v.abs();
        }
        acc += block_sum;
        scale = scale.max(acc.abs());
        if block_abs <= from_f64::<T>(TAIL_FRACTION) * scale.max(T::one()) {
            return Ok(acc);
        }
        h += block;
    }
    Err(Error::NonSummable { horizon: SCAN_HORIZON })
}

/// Slope of the large-`m` expectation: `E(f2(m, 1)) ~ slope * m` with
/// `slope = (1/15) sum_h gamma(h)` (and the cross-covariance analogue for
/// the detrended covariance).
pub fn asymptotic_expectation_slope<T: Scalar>(
    model: &CovarianceModel<T>,
    target: CovTarget,
) -> Result<T> {
    let kind = match target {
        CovTarget::Dfa1 => GammaKind::Auto1,
        CovTarget::Dfa2 => GammaKind::Auto2,
        CovTarget::Dcca => GammaKind::Cross,
    };
    Ok(covariance_sum(model, kind)? / from_f64::<T>(15.0))
}

/// Limit of `rho_DCCA` as both the sample size and the box size grow:
/// `sum gamma_12 / sqrt(sum gamma_1 * sum gamma_2)`.
pub fn rho_limit_from_model<T: Scalar>(model: &CovarianceModel<T>) -> Result<T> {
    let s1 = covariance_sum(model, GammaKind::Auto1)?;
    let s2 = covariance_sum(model, GammaKind::Auto2)?;
    if s1 <= T::zero() || s2 <= T::zero() {
        return Err(Error::DegenerateVariance);
    }
    Ok(covariance_sum(model, GammaKind::Cross)? / (s1.sqrt() * s2.sqrt()))
}

/// Same limit through the linear-process route:
/// `sign(sum psi_1 * sum psi_2) * tau12 / (tau1 tau2)`.
pub fn rho_limit_from_linear<T: Scalar>(spec: &LinearProcessSpec<T>) -> Result<T> {
    let s1 = spec.psi1().sum();
    let s2 = spec.psi2().sum();
    if s1 == T::zero() || s2 == T::zero() {
        return Err(Error::DegenerateVariance);
    }
    let sign = if (s1 * s2) > T::zero() { T::one() } else { -T::one() };
    Ok(sign * spec.tau12() / (spec.tau1_sq().sqrt() * spec.tau2_sq().sqrt()))
}
