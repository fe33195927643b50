//! Dense oracle for the fluctuation covariances.
//!
//! Materializes the Kronecker-sized matrices the production path avoids, so
//! the band/nested-sum evaluation in [`super::fluctuation_covariance`] can be
//! checked entrywise. Sizes are capped; this path exists for validation, not
//! for production use.

use nalgebra::DMatrix;

use crate::detrend::{BoxGeometry, DetrendOperators};
use crate::error::{Error, Result};
use crate::scalar::{from_f64, from_usize, Scalar};
use crate::theory::model::CovarianceModel;
use crate::theory::moments::assemble_gamma;
use crate::theory::{CovTarget, GammaKind};

/// Default cap on `(m+1)(m+1+h)`.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Lag-`h` fluctuation covariance computed from fully materialized matrices:
/// `K_otimes(h) = K (x) K(h)`, the cumulant block matrix, and the rectangular
/// window-covariance matrices.
pub fn fluctuation_covariance_dense<T: Scalar>(
    model: &CovarianceModel<T>,
    geometry: &BoxGeometry,
    h: usize,
    target: CovTarget,
    cap: usize,
) -> Result<T> {
    let m = geometry.m();
    let len = m + 1;
    let len_h = len + h;
    let size = len * len_h;
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }

    let ops = DetrendOperators::<T>::new(*geometry)?;
    let kernel = ops.kernel();
    let kernel_h = ops.kernel_shifted(h);

    let cum = if model.has_cumulant() {
        let k_otimes = kernel.kronecker(&kernel_h);
        // block (p, q), element (r, s) = kappa(p, r, q, s); all 1-based
        let mut blocks = DMatrix::<T>::zeros(size, size);
        for p in 0..len {
            for q in 0..len {
                for r in 0..len_h {
                    for s in 0..len_h {
                        blocks[(p * len_h + r, q * len_h + s)] =
                            model.cumulant(p + 1, r + 1, q + 1, s + 1);
                    }
                }
            }
        }
        trace_product(&k_otimes, &blocks)
    } else {
        T::zero()
    };

    let two = from_f64::<T>(2.0);
    let term = |kind_left: GammaKind, kind_right: GammaKind| -> Result<T> {
        let left = assemble_gamma(model, m, 0, h, kind_left)?;
        let right = assemble_gamma(model, m, h, 0, kind_right)?;
        Ok(trace_product(&(kernel * left), &(&kernel_h * right)))
    };
    let gamma_terms = match target {
        CovTarget::Dfa1 => two * term(GammaKind::Auto1, GammaKind::Auto1)?,
        CovTarget::Dfa2 => two * term(GammaKind::Auto2, GammaKind::Auto2)?,
        CovTarget::Dcca => {
            term(GammaKind::Auto1, GammaKind::Auto2)? + term(GammaKind::Cross, GammaKind::Cross)?
        }
    };

    let mf = from_usize::<T>(m);
    Ok((cum + gamma_terms) / (mf * mf))
}

/// `trace(A B)` without forming the product.
fn trace_product<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = T::zero();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
