#![allow(dead_code)]

//! Shared test helpers: an independent naive estimator used as the oracle
//! for the sliding kernel, and small utilities.

use dcca::detrend::BoxGeometry;
use dcca::estimator::SeriesPair;
use nalgebra::{DMatrix, DVector};

/// Naive per-box pipeline: integrates, then refits an independent
/// polynomial regression (monomial design on `t = 1..m+1`, SVD least
/// squares) in every box. Deliberately shares no code with the production
/// estimator path.
pub fn naive_per_box(pair: &SeriesPair<f64>, geometry: &BoxGeometry) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let cumsum = |x: &[f64]| {
        let mut acc = 0.0;
        x.iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect::<Vec<f64>>()
    };
    let r1 = cumsum(pair.x1());
    let r2 = cumsum(pair.x2());
    let m = geometry.m();
    let len = m + 1;
    let cols = geometry.nu() + 2;
    let count = geometry.mode().box_count(r1.len(), m);

    let mut design = DMatrix::<f64>::zeros(len, cols);
    for t in 0..len {
        let x = (t + 1) as f64;
        let mut p = 1.0;
        for c in 0..cols {
            design[(t, c)] = p;
            p *= x;
        }
    }
    let svd = design.clone().svd(true, true);
    let residuals = |w: &[f64]| -> DVector<f64> {
        let y = DVector::from_column_slice(w);
        let beta = svd.solve(&y, 1e-13).expect("least squares solvable");
        &y - &design * beta
    };

    let mut f2_1 = Vec::with_capacity(count);
    let mut f2_2 = Vec::with_capacity(count);
    let mut fx = Vec::with_capacity(count);
    for i in 0..count {
        let s = geometry.box_start(i);
        let e1 = residuals(&r1[s..s + len]);
        let e2 = residuals(&r2[s..s + len]);
        f2_1.push(e1.dot(&e1) / m as f64);
        f2_2.push(e2.dot(&e2) / m as f64);
        fx.push(e1.dot(&e2) / m as f64);
    }
    (f2_1, f2_2, fx)
}

/// Naive averaged profile quantities `(F2_1, F2_2, F_DCCA, rho)`.
pub fn naive_profile(pair: &SeriesPair<f64>, geometry: &BoxGeometry) -> (f64, f64, f64, f64) {
    let (f2_1, f2_2, fx) = naive_per_box(pair, geometry);
    let n = f2_1.len() as f64;
    let a = f2_1.iter().sum::<f64>() / n;
    let b = f2_2.iter().sum::<f64>() / n;
    let c = fx.iter().sum::<f64>() / n;
    (a, b, c, c / (a.sqrt() * b.sqrt()))
}

/// Sample mean and the standard error of the mean.
pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample variance and its standard error, from the fourth central moment.
pub fn variance_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let mu4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let se = ((mu4 - var * var * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt();
    (var, se)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}
