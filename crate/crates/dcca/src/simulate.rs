//! Seedable generators for the data-generating processes used in the
//! replication experiments, plus their exact population models.
//!
//! Generation is pure in `(scenario, n, seed)`: the same spec always yields
//! the same pair, and per-replication streams are derived by mixing the
//! master seed with the replication index, so parallel runs are
//! order-independent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{add_polynomial_trend, SeriesPair};
use crate::theory::{CoeffSeq, LinearProcessSpec};

/// Coefficient decay below which linear-process expansions are truncated,
/// relative to the largest coefficient.
const COEFF_FLOOR: f64 = 1e-15;

pub mod rng {
    //! Counter-based splittable generator and Gaussian sampling.

    /// SplitMix64: a 64-bit state walked by a fixed increment and finalized
    /// by an avalanche; trivially splittable by seeding from mixed words.
    #[derive(Debug, Clone)]
    pub struct SplitMix64 {
        state: u64,
    }

    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

    fn finalize(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    impl SplitMix64 {
        pub fn new(seed: u64) -> Self {
            SplitMix64 { state: seed }
        }

        pub fn next_u64(&mut self) -> u64 {
            self.state = self.state.wrapping_add(GOLDEN);
            finalize(self.state)
        }

        /// Uniform draw in `[0, 1)` with 53 random bits.
        pub fn next_f64(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
        }
    }

    /// Derives an independent stream seed from a master seed and an index.
    pub fn mix_seed(master: u64, index: u64) -> u64 {
        finalize(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// Standard normal draws via the polar rejection method.
    #[derive(Debug, Clone)]
    pub struct GaussianSource {
        rng: SplitMix64,
        spare: Option<f64>,
    }

    impl GaussianSource {
        pub fn new(seed: u64) -> Self {
            GaussianSource { rng: SplitMix64::new(seed), spare: None }
        }

        pub fn sample(&mut self) -> f64 {
            if let Some(v) = self.spare.take() {
                return v;
            }
            loop {
                let u = 2.0 * self.rng.next_f64() - 1.0;
                let v = 2.0 * self.rng.next_f64() - 1.0;
                let s = u * u + v * v;
                if s > 0.0 && s < 1.0 {
                    let f = (-2.0 * s.ln() / s).sqrt();
                    self.spare = Some(v * f);
                    return u * f;
                }
            }
        }

        pub fn take(&mut self, n: usize) -> Vec<f64> {
            (0..n).map(|_| self.sample()).collect()
        }
    }
}

use rng::{mix_seed, GaussianSource};

/// Data-generating process presets.
///
/// All innovations are standard Gaussian. The shared-noise variants drive
/// both series with the same innovation stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// Two independent i.i.d. unit Gaussian series.
    IidGaussianPair,
    /// I.i.d. pairs with correlation `rho` (unit variances).
    BivariateGaussian { rho: f64 },
    /// An AR(1) with coefficient 0.6 against an independent MA(1) with
    /// coefficient 0.6.
    Ar1VsMa1,
    /// `x2 = beta0 + beta1 * x1 + eps`, `x1` i.i.d. unit Gaussian and `eps`
    /// i.i.d. centered Gaussian with variance `noise_var`.
    SignalPlusNoise { beta0: f64, beta1: f64, noise_var: f64 },
    /// `x1` i.i.d. unit Gaussian; `x2_t = sum_{j=0}^q theta_j x1_{t-j}` with
    /// `theta_0 = 1` and `theta_j = (q + 1 - j)/10`.
    MaCascade { q: usize },
    /// `x1` i.i.d. unit Gaussian; `x2_t = phi x2_{t-1} + x1_t`.
    Ar1Driven { phi: f64 },
    /// `x_k,t = alpha_k x_k,t-1 + eps_t` with a common AR(1) innovation
    /// stream `eps_t = beta eps_{t-1} + eta_t`.
    SharedNoiseAr { alpha1: f64, alpha2: f64, beta: f64 },
    /// `x_k,t = eps_t + alpha_k eps_{t-1}` with the same common stream.
    SharedNoiseArma { alpha1: f64, alpha2: f64, beta: f64 },
}

pub const AR1_VS_MA1_PHI: f64 = 0.6;
pub const AR1_VS_MA1_THETA: f64 = 0.6;

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let stationary = |v: f64, name: &str| {
            if v.abs() < 1.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name}={v} must satisfy |{name}| < 1 for stationarity")))
            }
        };
        match *self {
            Scenario::IidGaussianPair | Scenario::Ar1VsMa1 => Ok(()),
            Scenario::BivariateGaussian { rho } => {
                if rho.abs() <= 1.0 && rho.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("rho={rho} must lie in [-1, 1]")))
                }
            }
            Scenario::SignalPlusNoise { noise_var, beta0, beta1 } => {
                if !noise_var.is_finite() || noise_var < 0.0 {
                    Err(Error::invalid(format!("noise_var={noise_var} must be non-negative")))
                } else if !beta0.is_finite() || !beta1.is_finite() {
                    Err(Error::invalid("signal-plus-noise coefficients must be finite"))
                } else {
                    Ok(())
                }
            }
            Scenario::MaCascade { q } => {
                if q >= 1 {
                    Ok(())
                } else {
                    Err(Error::invalid("ma_cascade order q must be at least 1"))
                }
            }
            Scenario::Ar1Driven { phi } => stationary(phi, "phi"),
            Scenario::SharedNoiseAr { alpha1, alpha2, beta }
            | Scenario::SharedNoiseArma { alpha1, alpha2, beta } => {
                stationary(alpha1, "alpha1")?;
                stationary(alpha2, "alpha2")?;
                stationary(beta, "beta")
            }
        }
    }

    /// Moving-average weights of the cascade: `theta_0 = 1`,
    /// `theta_j = (q + 1 - j)/10` for `1 <= j <= q`.
    pub fn ma_cascade_weights(q: usize) -> Vec<f64> {
        let mut theta = Vec::with_capacity(q + 1);
        theta.push(1.0);
        theta.extend((1..=q).map(|j| (q + 1 - j) as f64 / 10.0));
        theta
    }

    /// Exact population model of the generator, as a linear-process pair.
    pub fn theoretical_model(&self) -> Result<LinearProcessSpec<f64>> {
        self.validate()?;
        let spec = match *self {
            Scenario::IidGaussianPair => {
                LinearProcessSpec::new(CoeffSeq::delta(), CoeffSeq::delta(), 1.0, 1.0, 0.0)?
            }
            Scenario::BivariateGaussian { rho } => {
                LinearProcessSpec::new(CoeffSeq::delta(), CoeffSeq::delta(), 1.0, 1.0, rho)?
            }
            Scenario::Ar1VsMa1 => LinearProcessSpec::new(
                CoeffSeq::geometric(AR1_VS_MA1_PHI)?,
                CoeffSeq::causal(vec![1.0, AR1_VS_MA1_THETA])?,
                1.0,
                1.0,
                0.0,
            )?,
            Scenario::SignalPlusNoise { beta1, noise_var, .. } => LinearProcessSpec::new(
                CoeffSeq::delta(),
                CoeffSeq::delta(),
                1.0,
                beta1 * beta1 + noise_var,
                beta1,
            )?,
            Scenario::MaCascade { q } => LinearProcessSpec::new(
                CoeffSeq::delta(),
                CoeffSeq::causal(Self::ma_cascade_weights(q))?,
                1.0,
                1.0,
                1.0,
            )?,
            Scenario::Ar1Driven { phi } => LinearProcessSpec::new(
                CoeffSeq::delta(),
                CoeffSeq::geometric(phi)?,
                1.0,
                1.0,
                1.0,
            )?,
            Scenario::SharedNoiseAr { alpha1, alpha2, beta } => {
                // AR(1) cascaded with the innovation AR(1):
                // psi_j = (beta^(j+1) - alpha^(j+1)) / (beta - alpha)
                let psi = |alpha: f64| {
                    truncated_coeffs(|j| {
                        if (beta - alpha).abs() > 1e-12 {
                            (beta.powi(j as i32 + 1) - alpha.powi(j as i32 + 1)) / (beta - alpha)
                        } else {
                            (j as f64 + 1.0) * beta.powi(j as i32)
                        }
                    })
                };
                LinearProcessSpec::new(psi(alpha1)?, psi(alpha2)?, 1.0, 1.0, 1.0)?
            }
            Scenario::SharedNoiseArma { alpha1, alpha2, beta } => {
                // psi_0 = 1, psi_j = beta^(j-1) (beta + alpha) for j >= 1
                let psi = |alpha: f64| {
                    truncated_coeffs(|j| {
                        if j == 0 {
                            1.0
                        } else {
                            beta.powi(j as i32 - 1) * (beta + alpha)
                        }
                    })
                };
                LinearProcessSpec::new(psi(alpha1)?, psi(alpha2)?, 1.0, 1.0, 1.0)?
            }
        };
        Ok(spec)
    }

    /// Samples to discard before the kept window.
    fn burn_in(&self) -> usize {
        let ar = |phi_max: f64| 1000 + (50.0 / (1.0 - phi_max.abs())).ceil() as usize;
        match *self {
            Scenario::IidGaussianPair
            | Scenario::BivariateGaussian { .. }
            | Scenario::SignalPlusNoise { .. } => 0,
            Scenario::Ar1VsMa1 => ar(AR1_VS_MA1_PHI),
            Scenario::MaCascade { q } => q,
            Scenario::Ar1Driven { phi } => ar(phi),
            Scenario::SharedNoiseAr { alpha1, alpha2, beta } => {
                ar(alpha1.abs().max(alpha2.abs()).max(beta.abs()))
            }
            Scenario::SharedNoiseArma { beta, .. } => ar(beta.abs()).max(1),
        }
    }
}

/// Causal coefficients evaluated until they stay negligible, relative to the
/// largest one seen.
fn truncated_coeffs(f: impl Fn(usize) -> f64) -> Result<CoeffSeq<f64>> {
    const MAX_LEN: usize = 100_000;
    let mut weights = Vec::new();
    let mut max_abs = 0.0f64;
    let mut small_run = 0usize;
    for j in 0..MAX_LEN {
        let w = f(j);
        weights.push(w);
        max_abs = max_abs.max(w.abs());
        if w.abs() <= COEFF_FLOOR * max_abs.max(1.0) {
            small_run += 1;
            if small_run >= 4 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    CoeffSeq::causal(weights)
}

/// A scenario instance: process, sample length, master seed and optional
/// polynomial trend contamination added after generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub trend1: Option<Vec<f64>>,
    #[serde(default)]
    pub trend2: Option<Vec<f64>>,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, n: usize, seed: u64) -> Self {
        ScenarioSpec { scenario, n, seed, trend1: None, trend2: None }
    }

    pub fn with_trends(mut self, trend1: Option<Vec<f64>>, trend2: Option<Vec<f64>>) -> Self {
        self.trend1 = trend1;
        self.trend2 = trend2;
        self
    }
}

/// Generates a series pair. Identical specs produce identical output.
pub fn generate(spec: &ScenarioSpec) -> Result<SeriesPair<f64>> {
    spec.scenario.validate()?;
    if spec.n == 0 {
        return Err(Error::EmptyInput);
    }
    let n = spec.n;
    let burn = spec.scenario.burn_in();
    let mut s1 = GaussianSource::new(mix_seed(spec.seed, 1));
    let mut s2 = GaussianSource::new(mix_seed(spec.seed, 2));

    let (mut x1, mut x2) = match spec.scenario {
        Scenario::IidGaussianPair => (s1.take(n), s2.take(n)),
        Scenario::BivariateGaussian { rho } => {
            let scale = (1.0 - rho * rho).sqrt();
            let mut x1 = Vec::with_capacity(n);
            let mut x2 = Vec::with_capacity(n);
            for _ in 0..n {
                let z1 = s1.sample();
                let z2 = s1.sample();
                x1.push(z1);
                x2.push(rho * z1 + scale * z2);
            }
            (x1, x2)
        }
        Scenario::Ar1VsMa1 => {
            let e1 = s1.take(n + burn);
            let mut ar = vec![0.0; n + burn];
            for t in 1..n + burn {
                ar[t] = AR1_VS_MA1_PHI * ar[t - 1] + e1[t];
            }
            let e2 = s2.take(n + 1);
            let ma: Vec<f64> = (1..=n).map(|t| e2[t] + AR1_VS_MA1_THETA * e2[t - 1]).collect();
            (ar.split_off(burn), ma)
        }
        Scenario::SignalPlusNoise { beta0, beta1, noise_var } => {
            let x1 = s1.take(n);
            let sd = noise_var.sqrt();
            let x2 = x1.iter().map(|&v| beta0 + beta1 * v + sd * s2.sample()).collect();
            (x1, x2)
        }
        Scenario::MaCascade { q } => {
            let theta = Scenario::ma_cascade_weights(q);
            let full = s1.take(n + q);
            let x2 = (0..n)
                .map(|t| (0..=q).map(|j| theta[j] * full[q + t - j]).sum())
                .collect();
            (full[q..].to_vec(), x2)
        }
        Scenario::Ar1Driven { phi } => {
            let full = s1.take(n + burn);
            let mut x2 = vec![0.0; n + burn];
            for t in 1..n + burn {
                x2[t] = phi * x2[t - 1] + full[t];
            }
            (full[burn..].to_vec(), x2.split_off(burn))
        }
        Scenario::SharedNoiseAr { alpha1, alpha2, beta } => {
            let eps = common_ar1_stream(&mut s1, beta, n + burn);
            let mut x1 = vec![0.0; n + burn];
            let mut x2 = vec![0.0; n + burn];
            for t in 1..n + burn {
                x1[t] = alpha1 * x1[t - 1] + eps[t];
                x2[t] = alpha2 * x2[t - 1] + eps[t];
            }
            (x1.split_off(burn), x2.split_off(burn))
        }
        Scenario::SharedNoiseArma { alpha1, alpha2, beta } => {
            let eps = common_ar1_stream(&mut s1, beta, n + burn);
            let x1 = (burn..n + burn).map(|t| eps[t] + alpha1 * eps[t - 1]).collect();
            let x2 = (burn..n + burn).map(|t| eps[t] + alpha2 * eps[t - 1]).collect();
            (x1, x2)
        }
    };

    if let Some(c) = &spec.trend1 {
        x1 = add_polynomial_trend(&x1, c);
    }
    if let Some(c) = &spec.trend2 {
        x2 = add_polynomial_trend(&x2, c);
    }
    SeriesPair::new(x1, x2)
}

fn common_ar1_stream(src: &mut GaussianSource, beta: f64, len: usize) -> Vec<f64> {
    let mut eps = vec![0.0; len];
    for t in 1..len {
        eps[t] = beta * eps[t - 1] + src.sample();
    }
    eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::Component;
    use approx::assert_relative_eq;

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::new(Scenario::SharedNoiseAr { alpha1: 0.4, alpha2: 0.6, beta: 0.7 }, 500, 42);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate(&ScenarioSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bivariate_sample_correlation_in_band() {
        let rho = 0.5;
        let n = 2000;
        let spec = ScenarioSpec::new(Scenario::BivariateGaussian { rho }, n, 7);
        let pair = generate(&spec).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (m1, m2) = (mean(pair.x1()), mean(pair.x2()));
        let mut c = 0.0;
        let mut v1 = 0.0;
        let mut v2 = 0.0;
        for (a, b) in pair.x1().iter().zip(pair.x2()) {
            c += (a - m1) * (b - m2);
            v1 += (a - m1) * (a - m1);
            v2 += (b - m2) * (b - m2);
        }
        let r = c / (v1.sqrt() * v2.sqrt());
        // se ~ (1 - rho^2)/sqrt(n) = 0.017; allow 3.5 se
        assert!((r - rho).abs() < 0.06, "sample corr {r}");
    }

    #[test]
    fn signal_plus_noise_population_correlation() {
        let spec = Scenario::SignalPlusNoise { beta0: 3.0, beta1: 2.0, noise_var: 4.0 };
        let model = spec.theoretical_model().unwrap();
        let corr = model.tau12() / (model.tau1_sq().sqrt() * model.tau2_sq().sqrt());
        assert_relative_eq!(corr, 1.0 / 2.0f64.sqrt(), max_relative = 1e-12);
        let spec = Scenario::SignalPlusNoise { beta0: 3.0, beta1: 2.0, noise_var: 64.0 };
        let model = spec.theoretical_model().unwrap();
        let corr = model.tau12() / (model.tau1_sq().sqrt() * model.tau2_sq().sqrt());
        assert_relative_eq!(corr, 1.0 / 17.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn ma_cascade_model_cross_covariance() {
        let q = 20;
        let model = Scenario::MaCascade { q }.theoretical_model().unwrap();
        let theta = Scenario::ma_cascade_weights(q);
        for h in 0..=q as i64 {
            assert_relative_eq!(model.gamma_cross(h), theta[h as usize], max_relative = 1e-12);
        }
        assert_eq!(model.gamma_cross(q as i64 + 1), 0.0);
        assert_eq!(model.gamma_cross(-1), 0.0);
    }

    #[test]
    fn shared_noise_arma_coefficients() {
        let (a1, beta) = (0.4, 0.7);
        let model = Scenario::SharedNoiseArma { alpha1: a1, alpha2: 0.6, beta }
            .theoretical_model()
            .unwrap();
        let psi = model.psi1();
        assert_relative_eq!(psi.get(0), 1.0);
        for j in 1..6i64 {
            assert_relative_eq!(psi.get(j), beta.powi(j as i32 - 1) * (beta + a1), max_relative = 1e-12);
        }
    }

    #[test]
    fn generated_ar1_autocovariance_matches_model() {
        let phi = 0.6;
        let n = 20_000;
        let spec = ScenarioSpec::new(Scenario::Ar1Driven { phi }, n, 11);
        let pair = generate(&spec).unwrap();
        let model = Scenario::Ar1Driven { phi }.theoretical_model().unwrap();
        let x = pair.x2();
        let mean = x.iter().sum::<f64>() / n as f64;
        for h in 0..=5usize {
            let mut acc = 0.0;
            for t in 0..n - h {
                acc += (x[t] - mean) * (x[t + h] - mean);
            }
            let sample = acc / (n - h) as f64;
            let theory = model.gamma_auto(Component::Second, h as i64);
            // rough se of the autocovariance of an AR(1): sd ~ gamma(0)*sqrt(2/n)
            let se = model.gamma_auto(Component::Second, 0) * (2.0 / n as f64).sqrt();
            assert!(
                (sample - theory).abs() < 4.0 * se,
                "h={h}: sample={sample} theory={theory} se={se}"
            );
        }
    }

    #[test]
    fn shared_noise_streams_are_identical() {
        // reconstruct the common innovation stream from each marginal
        let (a1, a2, beta) = (0.4, 0.6, 0.7);
        let spec = ScenarioSpec::new(Scenario::SharedNoiseAr { alpha1: a1, alpha2: a2, beta }, 300, 5);
        let pair = generate(&spec).unwrap();
        let (x1, x2) = (pair.x1(), pair.x2());
        for t in 1..300 {
            let e_from_1 = x1[t] - a1 * x1[t - 1];
            let e_from_2 = x2[t] - a2 * x2[t - 1];
            assert_relative_eq!(e_from_1, e_from_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(generate(&ScenarioSpec::new(Scenario::Ar1Driven { phi: 1.0 }, 10, 0)).is_err());
        assert!(generate(&ScenarioSpec::new(Scenario::BivariateGaussian { rho: 1.5 }, 10, 0)).is_err());
        assert!(Scenario::SharedNoiseAr { alpha1: 0.4, alpha2: 1.2, beta: 0.1 }.validate().is_err());
    }

    #[test]
    fn trend_contamination_applies_after_generation() {
        let base = ScenarioSpec::new(Scenario::IidGaussianPair, 50, 3);
        let trended = base.clone().with_trends(Some(vec![1.0, 0.5]), None);
        let a = generate(&base).unwrap();
        let b = generate(&trended).unwrap();
        for t in 0..50 {
            let p = 1.0 + 0.5 * (t as f64 + 1.0);
            assert_relative_eq!(b.x1()[t], a.x1()[t] + p, epsilon = 1e-12);
            assert_eq!(b.x2()[t], a.x2()[t]);
        }
    }
}
