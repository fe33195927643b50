//! Detrending operators on a box grid.
//!
//! A box holds `m + 1` consecutive points of the integrated signal. Local
//! detrending removes the least-squares polynomial of degree `nu + 1` fitted
//! within the box. This module builds the deterministic matrices behind that
//! operation: the design matrix `D`, the projector `P` onto its column space,
//! the annihilator `Q = I - P`, the cumulative-sum matrix `J` and the kernel
//! `K = J'QJ`. Every population moment downstream is a band sum against `K`,
//! with weights `alpha_j` (the diagonal-offset sums of `K`) and their
//! normalized form `beta_j = alpha_j / alpha_0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_f64, from_usize, Scalar};

/// Largest supported detrending order. Higher orders make the polynomial
/// basis too ill-conditioned to be worth supporting.
pub const MAX_ORDER: usize = 5;

/// How boxes are laid out over a series of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxMode {
    /// Boxes slide by one step: `n - m` boxes.
    Overlapping,
    /// Boxes tile the series: `floor(n / (m + 1))` boxes.
    NonOverlapping,
}

impl BoxMode {
    pub fn box_count(self, n: usize, m: usize) -> usize {
        match self {
            BoxMode::Overlapping => n.saturating_sub(m),
            BoxMode::NonOverlapping => n / (m + 1),
        }
    }

    /// Start offset (0-based) of box `i` in the integrated signal.
    pub fn box_start(self, i: usize, m: usize) -> usize {
        match self {
            BoxMode::Overlapping => i,
            BoxMode::NonOverlapping => i * (m + 1),
        }
    }
}

impl std::fmt::Display for BoxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoxMode::Overlapping => write!(f, "overlap"),
            BoxMode::NonOverlapping => write!(f, "nonoverlap"),
        }
    }
}

/// Box size parameter `m`, detrending order `nu` and overlap mode.
///
/// Construction enforces `m >= nu + 2` so every box keeps at least one
/// residual degree of freedom, and `nu <= MAX_ORDER`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxGeometry {
    m: usize,
    nu: usize,
    mode: BoxMode,
}

impl BoxGeometry {
    pub fn new(m: usize, nu: usize, mode: BoxMode) -> Result<Self> {
        if nu > MAX_ORDER {
            return Err(Error::OrderCap { nu, max: MAX_ORDER });
        }
        if m < nu + 2 {
            return Err(Error::InvalidGeometry { m, nu });
        }
        Ok(BoxGeometry { m, nu, mode })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn mode(&self) -> BoxMode {
        self.mode
    }

    /// Points per box, `m + 1`.
    pub fn box_len(&self) -> usize {
        self.m + 1
    }

    /// Degree of the local polynomial fit, `nu + 1`.
    pub fn fit_degree(&self) -> usize {
        self.nu + 1
    }

    /// Number of boxes a series of length `n` admits.
    pub fn box_count(&self, n: usize) -> Result<usize> {
        if n < self.m + 1 {
            return Err(Error::SeriesTooShort { n, m: self.m });
        }
        Ok(self.mode.box_count(n, self.m))
    }

    pub fn box_start(&self, i: usize) -> usize {
        self.mode.box_start(i, self.m)
    }

    pub fn with_mode(&self, mode: BoxMode) -> Self {
        BoxGeometry { mode, ..*self }
    }
}

/// The deterministic matrices attached to a geometry.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DetrendOperators<T: Scalar> {
    geometry: BoxGeometry,
    design: DMatrix<T>,
    projector: DMatrix<T>,
    annihilator: DMatrix<T>,
    integrator: DMatrix<T>,
    kernel: DMatrix<T>,
}

impl<T: Scalar> DetrendOperators<T> {
    /// Builds all operators for `geometry`.
    ///
    /// The projector is computed from an orthogonal factorization of the
    /// design evaluated on a grid rescaled to `[-1, 1]`; projection is
    /// basis-invariant, so this equals the normal-equations form without its
    /// conditioning problems.
    pub fn new(geometry: BoxGeometry) -> Result<Self> {
        let m = geometry.m;
        let len = geometry.box_len();
        let cols = geometry.fit_degree() + 1;

        let basis = orthonormal_basis::<T>(m, geometry.nu);
        let mut projector = &basis * basis.transpose();
        // mirror the upper triangle so P (and hence Q and K) are exactly symmetric
        for r in 0..len {
            for c in 0..r {
                projector[(r, c)] = projector[(c, r)];
            }
        }
        let mut annihilator = DMatrix::<T>::identity(len, len);
        annihilator -= &projector;

        // K[r,s] = sum_{i>=r, j>=s} Q[i,j]: row suffix sums, then column suffix sums
        let mut suffix = annihilator.clone();
        for r in 0..len {
            for c in (0..len - 1).rev() {
                let v = suffix[(r, c + 1)];
                suffix[(r, c)] += v;
            }
        }
        for c in 0..len {
            for r in (0..len - 1).rev() {
                let v = suffix[(r + 1, c)];
                suffix[(r, c)] += v;
            }
        }
        // first row and column vanish identically (Q annihilates constants)
        let mut kernel = DMatrix::<T>::zeros(len, len);
        for r in 1..len {
            for c in r..len {
                kernel[(r, c)] = suffix[(r, c)];
                kernel[(c, r)] = suffix[(r, c)];
            }
        }

        let mut design = DMatrix::<T>::zeros(len, cols);
        for t in 0..len {
            let x = from_usize::<T>(t + 1);
            let mut p = T::one();
            for c in 0..cols {
                design[(t, c)] = p;
                p *= x;
            }
        }

        let mut integrator = DMatrix::<T>::zeros(len, len);
        for r in 0..len {
            for c in 0..=r {
                integrator[(r, c)] = T::one();
            }
        }

        Ok(DetrendOperators {
            geometry,
            design,
            projector,
            annihilator,
            integrator,
            kernel,
        })
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    /// Design matrix `D`: column `c` holds `t^c` for `t = 1..m+1`.
    pub fn design(&self) -> &DMatrix<T> {
        &self.design
    }

    /// Orthogonal projector `P` onto the polynomial column space.
    pub fn projector(&self) -> &DMatrix<T> {
        &self.projector
    }

    /// Residual maker `Q = I - P`.
    pub fn annihilator(&self) -> &DMatrix<T> {
        &self.annihilator
    }

    /// Lower-triangular all-ones matrix `J` (cumulative sums).
    pub fn integrator(&self) -> &DMatrix<T> {
        &self.integrator
    }

    /// Kernel `K = J'QJ`.
    pub fn kernel(&self) -> &DMatrix<T> {
        &self.kernel
    }

    /// Lag-shifted kernel of size `(m+1+h) x (m+1+h)`: zero except for the
    /// bottom-right block, which is `K`. Built from the block identity rather
    /// than by multiplying padded matrices.
    pub fn kernel_shifted(&self, h: usize) -> DMatrix<T> {
        let len = self.geometry.box_len();
        let mut out = DMatrix::<T>::zeros(len + h, len + h);
        out.view_mut((h, h), (len, len)).copy_from(&self.kernel);
        out
    }
}

/// Orthonormal basis for polynomials of degree `nu + 1` on the box grid,
/// evaluated on the grid rescaled to `[-1, 1]`.
pub(crate) fn orthonormal_basis<T: Scalar>(m: usize, nu: usize) -> DMatrix<T> {
    let (basis, _) = scaled_qr::<T>(m, nu);
    basis
}

/// Thin QR of the rescaled design: returns (Q factor, R factor).
pub(crate) fn scaled_qr<T: Scalar>(m: usize, nu: usize) -> (DMatrix<T>, DMatrix<T>) {
    let len = m + 1;
    let cols = nu + 2;
    let step = from_f64::<T>(2.0) / from_usize::<T>(m);
    let mut scaled = DMatrix::<T>::zeros(len, cols);
    for t in 0..len {
        let u = step * from_usize::<T>(t) - T::one();
        let mut p = T::one();
        for c in 0..cols {
            scaled[(t, c)] = p;
            p *= u;
        }
    }
    let qr = scaled.qr();
    (qr.q(), qr.r())
}

/// Diagonal-offset sums of the kernel and their normalized form.
///
/// `alpha[j]` is the sum of the `j`-th superdiagonal of `K`; `beta[j] =
/// alpha[j] / alpha[0]`. These are the weights with which covariance lags
/// enter expected fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCoefficients<T: Scalar> {
    m: usize,
    nu: usize,
    alpha: Vec<T>,
    beta: Vec<T>,
}

impl<T: Scalar> AlphaCoefficients<T> {
    /// Computes `alpha[0..=m]` from the kernel, for any supported order.
    pub fn from_operators(ops: &DetrendOperators<T>) -> Self {
        let m = ops.geometry.m;
        let alpha: Vec<T> = (0..=m)
            .map(|j| alpha_bruteforce(ops, j).expect("j in range"))
            .collect();
        let a0 = alpha[0];
        let beta = alpha.iter().map(|&a| a / a0).collect();
        AlphaCoefficients { m, nu: ops.geometry.nu, alpha, beta }
    }

    /// Closed forms, available for order-zero detrending only.
    pub fn closed_form(geometry: &BoxGeometry) -> Result<Self> {
        if geometry.nu != 0 {
            return Err(Error::UnsupportedOrder { nu: geometry.nu });
        }
        let m = geometry.m;
        let alpha: Vec<T> = (0..=m).map(|j| alpha_closed_form(m, j).expect("j in range")).collect();
        let a0 = alpha[0];
        let beta = alpha.iter().map(|&a| a / a0).collect();
        Ok(AlphaCoefficients { m, nu: 0, alpha, beta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn alpha(&self, j: usize) -> T {
        self.alpha[j]
    }

    pub fn beta(&self, j: usize) -> T {
        self.beta[j]
    }

    pub fn alphas(&self) -> &[T] {
        &self.alpha
    }

    pub fn betas(&self) -> &[T] {
        &self.beta
    }
}

/// `alpha_j`: sum of the `j`-th superdiagonal of `K`, i.e. the trace of `K`
/// against the single-offset indicator matrix, computed without
/// materializing that matrix.
pub fn alpha_bruteforce<T: Scalar>(ops: &DetrendOperators<T>, j: usize) -> Result<T> {
    let m = ops.geometry.m;
    if j > m {
        return Err(Error::IndexOutOfRange { index: j, max: m });
    }
    let k = &ops.kernel;
    let mut s = T::zero();
    for r in 0..(m + 1 - j) {
        s += k[(r, r + j)];
    }
    Ok(s)
}

/// Closed form for `alpha_j` at order zero:
/// `alpha_0 = (m^2 + 2m - 3) / 15` and
/// `alpha_j = [(m-j)(m+1-j)(m+2-j) / (m(m+1)(m+2))] * [alpha_0 - (j^2 + 3j(m+1)) / 10]`.
pub fn alpha_closed_form<T: Scalar>(m: usize, j: usize) -> Result<T> {
    if j > m {
        return Err(Error::IndexOutOfRange { index: j, max: m });
    }
    let mf = from_usize::<T>(m);
    let one = T::one();
    let two = from_f64::<T>(2.0);
    let three = from_f64::<T>(3.0);
    let ten = from_f64::<T>(10.0);
    let fifteen = from_f64::<T>(15.0);
    let a0 = (mf * mf + two * mf - three) / fifteen;
    if j == 0 {
        return Ok(a0);
    }
    let jf = from_usize::<T>(j);
    let lead = (mf - jf) * (mf + one - jf) * (mf + two - jf) / (mf * (mf + one) * (mf + two));
    Ok(lead * (a0 - (jf * jf + three * jf * (mf + one)) / ten))
}

/// Threshold below which `beta_j` is positive at order zero:
/// `[sqrt(105 m^2 + 210 m + 9) - 9(m+1)] / 6`.
pub fn sign_change_threshold<T: Scalar>(m: usize) -> T {
    let mf = from_usize::<T>(m);
    let c105 = from_f64::<T>(105.0);
    let c210 = from_f64::<T>(210.0);
    let c9 = from_f64::<T>(9.0);
    let c6 = from_f64::<T>(6.0);
    ((c105 * mf * mf + c210 * mf + c9).sqrt() - c9 * (mf + T::one())) / c6
}
