//! Expectations and covariances of the per-box fluctuation processes.

use nalgebra::DMatrix;

use crate::detrend::{AlphaCoefficients, BoxGeometry, DetrendOperators};
use crate::error::{Error, Result};
use crate::scalar::{from_f64, from_usize, Scalar};
use crate::theory::model::CovarianceModel;
use crate::theory::{Component, CovTarget, GammaKind};

/// Assembles the covariance matrix of two signal windows of sizes
/// `m + 1 + h1` and `m + 1 + h2`: entry `(r, s)` is `gamma(s - r)`.
///
/// Auto matrices are validated to be positive semidefinite when square.
pub fn assemble_gamma<T: Scalar>(
    model: &CovarianceModel<T>,
    m: usize,
    h1: usize,
    h2: usize,
    kind: GammaKind,
) -> Result<DMatrix<T>> {
    let rows = m + 1 + h1;
    let cols = m + 1 + h2;
    let mut out = DMatrix::<T>::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let lag = c as i64 - r as i64;
            out[(r, c)] = match kind {
                GammaKind::Auto1 => model.gamma_auto(Component::First, lag)?,
                GammaKind::Auto2 => model.gamma_auto(Component::Second, lag)?,
                GammaKind::Cross => model.gamma_cross(lag)?,
            };
        }
    }
    if rows == cols && kind != GammaKind::Cross {
        let eigs = out.symmetric_eigenvalues();
        let mut min_eig = eigs[0];
        for &e in eigs.iter() {
            if e < min_eig {
                min_eig = e;
            }
        }
        let tol = from_f64::<T>(1e-8) * out[(0, 0)] * from_usize::<T>(rows);
        if min_eig < -tol {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(out)
}

/// Expected per-box detrended variance `E(f2_DFA(m, i)) = trace(K Gamma_k)/m`,
/// evaluated as the band sum `[alpha_0 g(0) + 2 sum alpha_h g(h)] / m`.
pub fn expected_dfa<T: Scalar>(
    model: &CovarianceModel<T>,
    geometry: &BoxGeometry,
    which: Component,
) -> Result<T> {
    let ops = DetrendOperators::new(*geometry)?;
    expected_dfa_with(&AlphaCoefficients::from_operators(&ops), model, which)
}

/// Band-sum form taking precomputed coefficients (the per-grid loops reuse them).
pub fn expected_dfa_with<T: Scalar>(
    alpha: &AlphaCoefficients<T>,
    model: &CovarianceModel<T>,
    which: Component,
) -> Result<T> {
    let m = alpha.m();
    let two = from_f64::<T>(2.0);
    let mut acc = alpha.alpha(0) * model.gamma_auto(which, 0)?;
    for h in 1..m {
        acc += two * alpha.alpha(h) * model.gamma_auto(which, h as i64)?;
    }
    Ok(acc / from_usize::<T>(m))
}

/// Expected per-box detrended covariance `E(f_DCCA(m, i)) = trace(K Gamma_12)/m`.
pub fn expected_dcca<T: Scalar>(model: &CovarianceModel<T>, geometry: &BoxGeometry) -> Result<T> {
    let ops = DetrendOperators::new(*geometry)?;
    expected_dcca_with(&AlphaCoefficients::from_operators(&ops), model)
}

pub fn expected_dcca_with<T: Scalar>(
    alpha: &AlphaCoefficients<T>,
    model: &CovarianceModel<T>,
) -> Result<T> {
    let m = alpha.m();
    let mut acc = alpha.alpha(0) * model.gamma_cross(0)?;
    for h in 1..m {
        acc += alpha.alpha(h) * (model.gamma_cross(h as i64)? + model.gamma_cross(-(h as i64))?);
    }
    Ok(acc / from_usize::<T>(m))
}

/// Finite-`m` population coefficient
/// `rho_eps(m) = trace(K Gamma_12) / sqrt(trace(K Gamma_1) trace(K Gamma_2))`.
pub fn rho_eps<T: Scalar>(model: &CovarianceModel<T>, geometry: &BoxGeometry) -> Result<T> {
    let ops = DetrendOperators::new(*geometry)?;
    rho_eps_with(&AlphaCoefficients::from_operators(&ops), model)
}

pub fn rho_eps_with<T: Scalar>(alpha: &AlphaCoefficients<T>, model: &CovarianceModel<T>) -> Result<T> {
    let e1 = expected_dfa_with(alpha, model, Component::First)?;
    let e2 = expected_dfa_with(alpha, model, Component::Second)?;
    if e1 <= T::zero() || e2 <= T::zero() {
        return Err(Error::DegenerateVariance);
    }
    let ex = expected_dcca_with(alpha, model)?;
    Ok(ex / (e1.sqrt() * e2.sqrt()))
}

/// Lag-`h` covariance of the per-box fluctuation processes:
///
/// - `Dfa_k`:  `[T_kappa + 2 trace(K G_k^{0,h} K(h) G_k^{h,0})] / m^2`
/// - `Dcca`:   `[T_kappa + trace(K G_1^{0,h} K(h) G_2^{h,0})
///               + trace(K G_12^{0,h} K(h) G_12^{h,0})] / m^2`
///
/// where `T_kappa` is the cumulant trace, evaluated as a nested sum using the
/// zero border of `K` and the zero blocks of `K(h)` instead of materializing
/// the Kronecker-sized matrices; the trace terms use the shifted-band
/// identity, which reduces every factor to an `(m+1) x (m+1)` band matrix.
pub fn fluctuation_covariance<T: Scalar>(
    model: &CovarianceModel<T>,
    geometry: &BoxGeometry,
    h: usize,
    target: CovTarget,
) -> Result<T> {
    let ops = DetrendOperators::new(*geometry)?;
    fluctuation_covariance_with(&ops, model, h, target)
}

pub fn fluctuation_covariance_with<T: Scalar>(
    ops: &DetrendOperators<T>,
    model: &CovarianceModel<T>,
    h: usize,
    target: CovTarget,
) -> Result<T> {
    let m = ops.geometry().m();
    let mf = from_usize::<T>(m);
    let two = from_f64::<T>(2.0);
    let cum = cumulant_trace(ops, model, h);
    let gamma_terms = match target {
        CovTarget::Dfa1 => {
            let b = shifted_band(model, m, GammaKind::Auto1, h as i64)?;
            let c = shifted_band(model, m, GammaKind::Auto1, -(h as i64))?;
            two * trace_kbkc(ops.kernel(), &b, &c)
        }
        CovTarget::Dfa2 => {
            let b = shifted_band(model, m, GammaKind::Auto2, h as i64)?;
            let c = shifted_band(model, m, GammaKind::Auto2, -(h as i64))?;
            two * trace_kbkc(ops.kernel(), &b, &c)
        }
        CovTarget::Dcca => {
            let b1 = shifted_band(model, m, GammaKind::Auto1, h as i64)?;
            let c2 = shifted_band(model, m, GammaKind::Auto2, -(h as i64))?;
            let b12 = shifted_band(model, m, GammaKind::Cross, h as i64)?;
            let c12 = shifted_band(model, m, GammaKind::Cross, -(h as i64))?;
            trace_kbkc(ops.kernel(), &b1, &c2) + trace_kbkc(ops.kernel(), &b12, &c12)
        }
    };
    Ok((cum + gamma_terms) / (mf * mf))
}

/// `(m+1) x (m+1)` matrix with entry `(r, s) = gamma(s - r + shift)`.
fn shifted_band<T: Scalar>(
    model: &CovarianceModel<T>,
    m: usize,
    kind: GammaKind,
    shift: i64,
) -> Result<DMatrix<T>> {
    let len = m + 1;
    let mut out = DMatrix::<T>::zeros(len, len);
    for r in 0..len {
        for c in 0..len {
            let lag = c as i64 - r as i64 + shift;
            out[(r, c)] = match kind {
                GammaKind::Auto1 => model.gamma_auto(Component::First, lag)?,
                GammaKind::Auto2 => model.gamma_auto(Component::Second, lag)?,
                GammaKind::Cross => model.gamma_cross(lag)?,
            };
        }
    }
    Ok(out)
}

/// `trace(K B K C)` via two products and an elementwise trace.
fn trace_kbkc<T: Scalar>(k: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>) -> T {
    let kb = k * b;
    let kc = k * c;
    let n = k.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += kb[(i, j)] * kc[(j, i)];
        }
    }
    acc
}

/// Cumulant trace `trace(K_otimes(h) Kappa(h))` as the quadruple sum
/// `sum_{p,l,tau,q} K[p,l] K[tau,q] kappa(l, h+q, p, h+tau)` over 1-based
/// indices in `2..=m+1` (the first row and column of `K` vanish).
fn cumulant_trace<T: Scalar>(ops: &DetrendOperators<T>, model: &CovarianceModel<T>, h: usize) -> T {
    if !model.has_cumulant() {
        return T::zero();
    }
    let len = ops.geometry().box_len();
    let k = ops.kernel();
    let mut acc = T::zero();
    for p in 1..len {
        for l in 1..len {
            let kpl = k[(p, l)];
            if kpl == T::zero() {
                continue;
            }
            for tau in 1..len {
                for q in 1..len {
                    let w = k[(tau, q)];
                    if w == T::zero() {
                        continue;
                    }
                    acc += kpl * w * model.cumulant(l + 1, h + q + 1, p + 1, h + tau + 1);
                }
            }
        }
    }
    acc
}
