//! Sample DFA / DCCA pipeline.
//!
//! The integrated signal is split into boxes of `m + 1` points; each box is
//! detrended by its own least-squares polynomial of degree `nu + 1`, and the
//! per-box second moments of the residuals are averaged into the detrended
//! variance `F2_DFA(m)`, the detrended covariance `F_DCCA(m)` and the
//! detrended correlation coefficient `rho_DCCA(m)`.
//!
//! In overlapping mode the per-box quantities are produced by a sliding
//! kernel that maintains power sums of the window against a fixed in-box
//! polynomial basis, so advancing a box costs `O(nu^2)` instead of a fresh
//! fit. Non-overlapping boxes are fitted directly. Both paths are pinned to a
//! naive per-box regression oracle in the test suites.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::detrend::{scaled_qr, BoxGeometry, BoxMode, DetrendOperators};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Recompute the sliding sums from scratch this often, to keep drift from
/// the shift recurrence below the oracle tolerance on long series.
const REFRESH_INTERVAL: usize = 64;

/// Two equally long series observed on the same sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair<T> {
    x1: Vec<T>,
    x2: Vec<T>,
}

impl<T: Scalar> SeriesPair<T> {
    pub fn new(x1: Vec<T>, x2: Vec<T>) -> Result<Self> {
        if x1.is_empty() || x2.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x1.len() != x2.len() {
            return Err(Error::LengthMismatch { left: x1.len(), right: x2.len() });
        }
        Ok(SeriesPair { x1, x2 })
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty input
    }

    pub fn x1(&self) -> &[T] {
        &self.x1
    }

    pub fn x2(&self) -> &[T] {
        &self.x2
    }

    /// Swaps the two components.
    pub fn swapped(&self) -> Self {
        SeriesPair { x1: self.x2.clone(), x2: self.x1.clone() }
    }
}

/// Integrated signal: cumulative sums of the raw series.
pub fn integrate<T: Scalar>(series: &[T]) -> Result<Vec<T>> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(series.len());
    let mut acc = T::zero();
    for &x in series {
        acc += x;
        out.push(acc);
    }
    Ok(out)
}

/// Adds the polynomial `p(t) = sum_k coefficients[k] * t^k`, evaluated on
/// `t = 1..n`, to the series.
pub fn add_polynomial_trend<T: Scalar>(series: &[T], coefficients: &[T]) -> Vec<T> {
    series
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = from_usize::<T>(i + 1);
            let mut p = T::zero();
            for &c in coefficients.iter().rev() {
                p = p * t + c;
            }
            x + p
        })
        .collect()
}

/// Residuals of box `box_index`: the window of the integrated profile minus
/// its in-box least-squares polynomial fit, i.e. `Q` applied to the window.
pub fn box_residuals<T: Scalar>(
    profile: &[T],
    ops: &DetrendOperators<T>,
    box_index: usize,
) -> Result<Vec<T>> {
    let geometry = ops.geometry();
    let len = geometry.box_len();
    let start = geometry.box_start(box_index);
    let end = start + len;
    if end > profile.len() {
        return Err(Error::IndexOutOfRange {
            index: box_index,
            max: geometry.mode().box_count(profile.len(), geometry.m()).saturating_sub(1),
        });
    }
    let w = DVector::from_column_slice(&profile[start..end]);
    let r = ops.annihilator() * w;
    Ok(r.as_slice().to_vec())
}

/// Per-box fluctuation series over every box the pair admits.
#[derive(Debug, Clone, PartialEq)]
pub struct PerBoxSeries<T> {
    pub geometry: BoxGeometry,
    pub f2_dfa_1: Vec<T>,
    pub f2_dfa_2: Vec<T>,
    pub f_dcca: Vec<T>,
}

impl<T: Scalar> PerBoxSeries<T> {
    pub fn box_count(&self) -> usize {
        self.f_dcca.len()
    }
}

/// Computes the per-box detrended variances and covariance. The divisor is
/// exactly `m` for an `m + 1`-point box.
pub fn per_box_series<T: Scalar>(pair: &SeriesPair<T>, geometry: BoxGeometry) -> Result<PerBoxSeries<T>> {
    let n = pair.len();
    let count = geometry.box_count(n)?;
    let r1 = integrate(pair.x1())?;
    let r2 = integrate(pair.x2())?;
    let basis = LocalBasis::<T>::new(geometry.m(), geometry.nu());
    let (f2_dfa_1, f2_dfa_2, f_dcca) = match geometry.mode() {
        BoxMode::Overlapping => sliding_boxes(&r1, &r2, &basis, count),
        BoxMode::NonOverlapping => direct_boxes(&r1, &r2, &basis, &geometry, count),
    };
    Ok(PerBoxSeries { geometry, f2_dfa_1, f2_dfa_2, f_dcca })
}

/// One entry of a [`FluctuationProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint<T> {
    pub m: usize,
    pub f2_dfa_1: T,
    pub f2_dfa_2: T,
    pub f_dcca: T,
    /// `None` when either detrended variance vanished; never reported as 0.
    pub rho: Option<T>,
    pub degenerate: bool,
}

/// Averaged fluctuation quantities over a grid of box parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationProfile<T> {
    pub nu: usize,
    pub mode: BoxMode,
    pub points: Vec<ProfilePoint<T>>,
}

/// Runs the full pipeline for every `m` in the grid.
///
/// Every `m` must satisfy the geometry constraints against the series
/// length; callers that want per-`m` error reporting should filter the grid
/// first. The per-`m` computations are independent and run in parallel with
/// results identical to sequential evaluation.
pub fn fluctuation_profile<T: Scalar + Send + Sync>(
    pair: &SeriesPair<T>,
    m_grid: &[usize],
    nu: usize,
    mode: BoxMode,
) -> Result<FluctuationProfile<T>> {
    let points = m_grid
        .par_iter()
        .map(|&m| {
            let geometry = BoxGeometry::new(m, nu, mode)?;
            let per_box = per_box_series(pair, geometry)?;
            Ok(profile_point(&per_box))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FluctuationProfile { nu, mode, points })
}

fn profile_point<T: Scalar>(per_box: &PerBoxSeries<T>) -> ProfilePoint<T> {
    let count = from_usize::<T>(per_box.box_count());
    let f2_1 = per_box.f2_dfa_1.iter().copied().sum::<T>() / count;
    let f2_2 = per_box.f2_dfa_2.iter().copied().sum::<T>() / count;
    let f_dcca = per_box.f_dcca.iter().copied().sum::<T>() / count;
    let degenerate = f2_1 <= T::zero() || f2_2 <= T::zero();
    // the exact ratio satisfies |rho| <= 1 (Cauchy-Schwarz applied twice);
    // rounding in the dot-minus kernel can push the computed value past the
    // boundary when a box has a single residual degree of freedom, where the
    // exact per-box value is +-1, so clamping restores the exact property
    let rho = if degenerate {
        None
    } else {
        Some(clamp_unit(f_dcca / (f2_1.sqrt() * f2_2.sqrt())))
    };
    ProfilePoint {
        m: per_box.geometry.m(),
        f2_dfa_1: f2_1,
        f2_dfa_2: f2_2,
        f_dcca,
        rho,
        degenerate,
    }
}

fn clamp_unit<T: Scalar>(x: T) -> T {
    if x > T::one() {
        T::one()
    } else if x < -T::one() {
        -T::one()
    } else {
        x
    }
}

/// Fixed in-box polynomial basis on the grid rescaled to `[-1, 1]`, plus the
/// map from window power sums to coordinates in the orthonormal basis.
struct LocalBasis<T: Scalar> {
    m: usize,
    cols: usize,
    step: T,
    ortho: DMatrix<T>,
    coeff_map: DMatrix<T>,
}

impl<T: Scalar> LocalBasis<T> {
    fn new(m: usize, nu: usize) -> Self {
        let (ortho, r) = scaled_qr::<T>(m, nu);
        let cols = nu + 2;
        let rinv = r
            .solve_upper_triangular(&DMatrix::<T>::identity(cols, cols))
            .expect("triangular factor invertible for valid geometry");
        LocalBasis {
            m,
            cols,
            step: crate::scalar::from_f64::<T>(2.0) / from_usize::<T>(m),
            ortho,
            coeff_map: rinv.transpose(),
        }
    }

    /// Power sums of a window against the scaled grid: `p[c] = sum_t u_t^c w_t`.
    fn power_sums(&self, w: &[T]) -> Vec<T> {
        let mut p = vec![T::zero(); self.cols];
        for (t, &v) in w.iter().enumerate() {
            let u = self.step * from_usize::<T>(t) - T::one();
            let mut pw = T::one();
            for pc in p.iter_mut() {
                *pc += pw * v;
                pw *= u;
            }
        }
        p
    }

    /// Coordinates of the window in the orthonormal basis, from power sums.
    fn coords(&self, p: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|r| (0..self.cols).map(|c| self.coeff_map[(r, c)] * p[c]).sum())
            .collect()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Overlapping boxes: slide the window one step at a time.
///
/// Advancing shifts the grid under the window, which maps power sums through
/// a binomial transform; the window dot products update in O(1). The sums are
/// refreshed from scratch periodically.
fn sliding_boxes<T: Scalar>(
    r1: &[T],
    r2: &[T],
    basis: &LocalBasis<T>,
    count: usize,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let m = basis.m;
    let len = m + 1;
    let cols = basis.cols;
    let a = basis.step;
    let mf = from_usize::<T>(m);

    // shift[c][e] = binom(c, e) * (-a)^(c-e); out_w[c] = (-1-a)^c
    let mut binom = vec![vec![T::zero(); cols]; cols];
    for c in 0..cols {
        binom[c][0] = T::one();
        binom[c][c] = T::one();
        for e in 1..c {
            binom[c][e] = binom[c - 1][e - 1] + binom[c - 1][e];
        }
    }
    let mut shift = vec![vec![T::zero(); cols]; cols];
    for c in 0..cols {
        for e in 0..=c {
            shift[c][e] = binom[c][e] * (-a).powi((c - e) as i32);
        }
    }
    let out_w: Vec<T> = (0..cols).map(|c| (-T::one() - a).powi(c as i32)).collect();

    let mut f2_1 = Vec::with_capacity(count);
    let mut f2_2 = Vec::with_capacity(count);
    let mut fx = Vec::with_capacity(count);

    let mut p1 = vec![T::zero(); cols];
    let mut p2 = vec![T::zero(); cols];
    let (mut d11, mut d22, mut d12) = (T::zero(), T::zero(), T::zero());
    let mut scratch = vec![T::zero(); cols];

    for i in 0..count {
        if i.is_multiple_of(REFRESH_INTERVAL) {
            let w1 = &r1[i..i + len];
            let w2 = &r2[i..i + len];
            p1 = basis.power_sums(w1);
            p2 = basis.power_sums(w2);
            d11 = dot(w1, w1);
            d22 = dot(w2, w2);
            d12 = dot(w1, w2);
        } else {
            let s = i - 1;
            let (o1, n1) = (r1[s], r1[s + len]);
            let (o2, n2) = (r2[s], r2[s + len]);
            for c in (0..cols).rev() {
                let mut acc = T::zero();
                for e in 0..=c {
                    acc += shift[c][e] * p1[e];
                }
                scratch[c] = acc + n1 - out_w[c] * o1;
            }
            std::mem::swap(&mut p1, &mut scratch);
            for c in (0..cols).rev() {
                let mut acc = T::zero();
                for e in 0..=c {
                    acc += shift[c][e] * p2[e];
                }
                scratch[c] = acc + n2 - out_w[c] * o2;
            }
            std::mem::swap(&mut p2, &mut scratch);
            d11 += n1 * n1 - o1 * o1;
            d22 += n2 * n2 - o2 * o2;
            d12 += n1 * n2 - o1 * o2;
        }
        let g1 = basis.coords(&p1);
        let g2 = basis.coords(&p2);
        f2_1.push(((d11 - dot(&g1, &g1)) / mf).max(T::zero()));
        f2_2.push(((d22 - dot(&g2, &g2)) / mf).max(T::zero()));
        fx.push((d12 - dot(&g1, &g2)) / mf);
    }
    (f2_1, f2_2, fx)
}

/// Non-overlapping boxes: fit each box directly against the orthonormal basis.
fn direct_boxes<T: Scalar>(
    r1: &[T],
    r2: &[T],
    basis: &LocalBasis<T>,
    geometry: &BoxGeometry,
    count: usize,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let len = geometry.box_len();
    let mf = from_usize::<T>(geometry.m());
    let mut f2_1 = Vec::with_capacity(count);
    let mut f2_2 = Vec::with_capacity(count);
    let mut fx = Vec::with_capacity(count);
    let mut e1 = vec![T::zero(); len];
    let mut e2 = vec![T::zero(); len];
    for i in 0..count {
        let s = geometry.box_start(i);
        let w1 = &r1[s..s + len];
        let w2 = &r2[s..s + len];
        residual_into(basis, w1, &mut e1);
        residual_into(basis, w2, &mut e2);
        f2_1.push(dot(&e1, &e1) / mf);
        f2_2.push(dot(&e2, &e2) / mf);
        fx.push(dot(&e1, &e2) / mf);
    }
    (f2_1, f2_2, fx)
}

fn residual_into<T: Scalar>(basis: &LocalBasis<T>, w: &[T], out: &mut [T]) {
    let cols = basis.cols;
    let mut g = vec![T::zero(); cols];
    for (c, gc) in g.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (t, &v) in w.iter().enumerate() {
            acc += basis.ortho[(t, c)] * v;
        }
        *gc = acc;
    }
    for (t, o) in out.iter_mut().enumerate() {
        let mut fit = T::zero();
        for (c, &gc) in g.iter().enumerate() {
            fit += basis.ortho[(t, c)] * gc;
        }
        *o = w[t] - fit;
    }
}
