//! Covariance models and linear-process specifications.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};
use crate::theory::Component;

/// Relative coefficient mass a truncating builder may discard.
pub(crate) const TRUNCATION_MASS: f64 = 1e-12;

type LagFn<T> = Arc<dyn Fn(i64) -> Option<T> + Send + Sync>;
type CumulantFn<T> = Arc<dyn Fn(usize, usize, usize, usize) -> T + Send + Sync>;

/// A finitely supported coefficient sequence over signed indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq<T> {
    first_index: i64,
    weights: Vec<T>,
}

impl<T: Scalar> CoeffSeq<T> {
    pub fn new(first_index: i64, weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(CoeffSeq { first_index, weights })
    }

    /// Coefficients supported on `j = 0, 1, ...`.
    pub fn causal(weights: Vec<T>) -> Result<Self> {
        CoeffSeq::new(0, weights)
    }

    /// The unit spike at index zero.
    pub fn delta() -> Self {
        CoeffSeq { first_index: 0, weights: vec![T::one()] }
    }

    /// Geometric coefficients `rate^j`, `j >= 0`, truncated once the
    /// discarded absolute mass drops below 1e-12 of the total.
    pub fn geometric(rate: T) -> Result<Self> {
        if rate.abs() >= T::one() {
            return Err(Error::invalid("geometric coefficient rate must satisfy |rate| < 1"));
        }
        if rate == T::zero() {
            return Ok(CoeffSeq::delta());
        }
        // tail mass ratio of a geometric series is |rate|^(J+1)
        let len = (TRUNCATION_MASS.ln() / rate.abs().to_f64().unwrap().ln()).ceil() as usize + 1;
        let mut weights = Vec::with_capacity(len);
        let mut w = T::one();
        for _ in 0..len {
            weights.push(w);
            w *= rate;
        }
        Ok(CoeffSeq { first_index: 0, weights })
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.weights.len() as i64 - 1
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn get(&self, j: i64) -> T {
        let off = j - self.first_index;
        if off < 0 || off as usize >= self.weights.len() {
            T::zero()
        } else {
            self.weights[off as usize]
        }
    }

    pub fn sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `sum_j self_j * other_{j+h}`.
    pub fn convolve(&self, other: &Self, h: i64) -> T {
        let lo = self.first_index.max(other.first_index - h);
        let hi = self.last_index().min(other.last_index() - h);
        let mut acc = T::zero();
        let mut j = lo;
        while j <= hi {
            acc += self.get(j) * other.get(j + h);
            j += 1;
        }
        acc
    }

    /// Largest `|h|` for which `convolve(other, h)` can be nonzero.
    pub fn overlap_bound(&self, other: &Self) -> usize {
        let a = (other.last_index() - self.first_index).unsigned_abs();
        let b = (self.last_index() - other.first_index).unsigned_abs();
        a.max(b) as usize
    }
}

/// Two linear processes driven by contemporaneously correlated white noise:
/// `X_{k,t} = sum_j psi_{k,j} eps_{k,t-j}` with innovation variances
/// `tau_k^2` and lag-zero innovation covariance `tau12`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProcessSpec<T> {
    psi1: CoeffSeq<T>,
    psi2: CoeffSeq<T>,
    tau1_sq: T,
    tau2_sq: T,
    tau12: T,
}

impl<T: Scalar> LinearProcessSpec<T> {
    pub fn new(psi1: CoeffSeq<T>, psi2: CoeffSeq<T>, tau1_sq: T, tau2_sq: T, tau12: T) -> Result<Self> {
        if tau1_sq <= T::zero() || tau2_sq <= T::zero() {
            return Err(Error::invalid("innovation variances must be positive"));
        }
        if tau12 * tau12 > tau1_sq * tau2_sq * (T::one() + from_f64(1e-12)) {
            return Err(Error::invalid("innovation covariance violates |tau12|^2 <= tau1^2 tau2^2"));
        }
        Ok(LinearProcessSpec { psi1, psi2, tau1_sq, tau2_sq, tau12 })
    }

    pub fn psi1(&self) -> &CoeffSeq<T> {
        &self.psi1
    }

    pub fn psi2(&self) -> &CoeffSeq<T> {
        &self.psi2
    }

    pub fn tau1_sq(&self) -> T {
        self.tau1_sq
    }

    pub fn tau2_sq(&self) -> T {
        self.tau2_sq
    }

    pub fn tau12(&self) -> T {
        self.tau12
    }

    /// `gamma_k(h) = tau_k^2 sum_j psi_{k,j} psi_{k,j+h}`.
    pub fn gamma_auto(&self, which: Component, h: i64) -> T {
        match which {
            Component::First => self.tau1_sq * self.psi1.convolve(&self.psi1, h.abs()),
            Component::Second => self.tau2_sq * self.psi2.convolve(&self.psi2, h.abs()),
        }
    }

    /// `gamma_{1,2}(h) = tau12 sum_j psi_{1,j} psi_{2,j+h}` (signed lag).
    pub fn gamma_cross(&self, h: i64) -> T {
        self.tau12 * self.psi1.convolve(&self.psi2, h)
    }
}

/// Builds the covariance model induced by a linear-process specification,
/// with a Gaussian-innovation (zero) cumulant.
pub fn linear_process_cov<T: Scalar>(spec: &LinearProcessSpec<T>) -> CovarianceModel<T> {
    let support = spec
        .psi1
        .overlap_bound(&spec.psi1)
        .max(spec.psi2.overlap_bound(&spec.psi2))
        .max(spec.psi1.overlap_bound(&spec.psi2));
    let s1 = spec.clone();
    let s2 = spec.clone();
    let s12 = spec.clone();
    CovarianceModel {
        gamma1: Arc::new(move |h| Some(s1.gamma_auto(Component::First, h))),
        gamma2: Arc::new(move |h| Some(s2.gamma_auto(Component::Second, h))),
        gamma12: Arc::new(move |h| Some(s12.gamma_cross(h))),
        kappa: None,
        support: Some(support),
    }
}

/// Second-order description of the pair: autocovariances of each component,
/// the signed-lag cross-covariance, and an optional joint fourth-order
/// cumulant (zero for Gaussian inputs).
///
/// Autocovariances are queried at `|h|`, so evenness holds by construction.
/// A lag function returning `None` signals that the model cannot supply that
/// lag. `support` is the lag beyond which everything is known to vanish.
#[derive(Clone)]
pub struct CovarianceModel<T> {
    pub(crate) gamma1: LagFn<T>,
    pub(crate) gamma2: LagFn<T>,
    pub(crate) gamma12: LagFn<T>,
    pub(crate) kappa: Option<CumulantFn<T>>,
    pub(crate) support: Option<usize>,
}

impl<T: Scalar> fmt::Debug for CovarianceModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovarianceModel")
            .field("kappa", &self.kappa.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl<T: Scalar> CovarianceModel<T> {
    /// Builds a model from lag functions. Fails if either variance at lag
    /// zero is not strictly positive.
    pub fn from_fns<F1, F2, F12>(gamma1: F1, gamma2: F2, gamma12: F12) -> Result<Self>
    where
        F1: Fn(i64) -> Option<T> + Send + Sync + 'static,
        F2: Fn(i64) -> Option<T> + Send + Sync + 'static,
        F12: Fn(i64) -> Option<T> + Send + Sync + 'static,
    {
        let model = CovarianceModel {
            gamma1: Arc::new(gamma1),
            gamma2: Arc::new(gamma2),
            gamma12: Arc::new(gamma12),
            kappa: None,
            support: None,
        };
        for which in [Component::First, Component::Second] {
            if model.gamma_auto(which, 0)? <= T::zero() {
                return Err(Error::invalid("autocovariance at lag 0 must be positive"));
            }
        }
        Ok(model)
    }

    /// Bivariate white noise with the given variances and lag-zero covariance.
    pub fn white_noise(var1: T, var2: T, cov12: T) -> Result<Self> {
        if var1 <= T::zero() || var2 <= T::zero() {
            return Err(Error::invalid("white-noise variances must be positive"));
        }
        if cov12 * cov12 > var1 * var2 * (T::one() + from_f64(1e-12)) {
            return Err(Error::invalid("white-noise covariance violates Cauchy-Schwarz"));
        }
        let mut model = Self::from_fns(
            move |h| Some(if h == 0 { var1 } else { T::zero() }),
            move |h| Some(if h == 0 { var2 } else { T::zero() }),
            move |h| Some(if h == 0 { cov12 } else { T::zero() }),
        )?;
        model.support = Some(0);
        Ok(model)
    }

    /// Declares the lag beyond which all covariances vanish.
    pub fn with_support(mut self, support: usize) -> Self {
        self.support = Some(support);
        self
    }

    /// Attaches a joint fourth-order cumulant `kappa(p, r, q, s)` (1-based
    /// time indices). The pair of components it refers to follows the
    /// evaluation target: `(1,1)` for DFA of the first series, `(2,2)` for
    /// the second, `(1,2)` for DCCA.
    pub fn with_cumulant<F>(mut self, kappa: F) -> Self
    where
        F: Fn(usize, usize, usize, usize) -> T + Send + Sync + 'static,
    {
        self.kappa = Some(Arc::new(kappa));
        self
    }

    pub fn support(&self) -> Option<usize> {
        self.support
    }

    pub fn has_cumulant(&self) -> bool {
        self.kappa.is_some()
    }

    pub fn gamma_auto(&self, which: Component, h: i64) -> Result<T> {
        let h = h.abs();
        let f = match which {
            Component::First => &self.gamma1,
            Component::Second => &self.gamma2,
        };
        if let Some(s) = self.support {
            if h.unsigned_abs() as usize > s {
                return Ok(T::zero());
            }
        }
        f(h).ok_or(Error::LagUnavailable { lag: h })
    }

    pub fn gamma_cross(&self, h: i64) -> Result<T> {
        if let Some(s) = self.support {
            if h.unsigned_abs() as usize > s {
                return Ok(T::zero());
            }
        }
        (self.gamma12)(h).ok_or(Error::LagUnavailable { lag: h })
    }

    pub(crate) fn cumulant(&self, p: usize, r: usize, q: usize, s: usize) -> T {
        match &self.kappa {
            Some(f) => f(p, r, q, s),
            None => T::zero(),
        }
    }
}
