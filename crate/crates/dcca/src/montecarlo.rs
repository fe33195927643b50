//! Deterministic Monte Carlo harness.
//!
//! Sweeps a grid of box parameters over many replications of a scenario,
//! summarizes the sampling distribution of `rho_DCCA(m)` and attaches the
//! population reference value per `m`. Replications run in parallel;
//! per-replication seeds are derived from the master seed, and aggregation
//! is deterministic, so parallel and sequential runs agree exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::detrend::{BoxGeometry, BoxMode};
use crate::error::{Error, Result};
use crate::estimator::{fluctuation_profile, ProfilePoint};
use crate::simulate::{generate, rng::mix_seed, Scenario, ScenarioSpec};
use crate::theory::{linear_process_cov, rho_eps};

/// A replication study: scenario, sample length, grid and seeding. Optional
/// polynomial trends contaminate every replication after generation.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub reps: usize,
    pub m_grid: Vec<usize>,
    pub nu: usize,
    pub mode: BoxMode,
    pub master_seed: u64,
    pub trend1: Option<Vec<f64>>,
    pub trend2: Option<Vec<f64>>,
}

impl McConfig {
    pub fn new(scenario: Scenario, n: usize, reps: usize, m_grid: Vec<usize>) -> Self {
        McConfig {
            scenario,
            n,
            reps,
            m_grid,
            nu: 0,
            mode: BoxMode::Overlapping,
            master_seed: 0,
            trend1: None,
            trend2: None,
        }
    }

    fn rep_spec(&self, rep: usize) -> ScenarioSpec {
        ScenarioSpec::new(self.scenario.clone(), self.n, mix_seed(self.master_seed, rep as u64))
            .with_trends(self.trend1.clone(), self.trend2.clone())
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.reps == 0 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if self.m_grid.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &m in &self.m_grid {
            let g = BoxGeometry::new(m, self.nu, self.mode)?;
            g.box_count(self.n)?;
        }
        Ok(())
    }
}

/// Distribution summary of `rho_DCCA(m)` at one grid point, plus means and
/// standard deviations of the underlying fluctuation quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStat {
    pub m: usize,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub mean: f64,
    pub sd: f64,
    /// Replications with a defined `rho`; excluded ones had degenerate variance.
    pub effective: usize,
    pub excluded: usize,
    /// Population value `rho_eps(m)` of the scenario, when defined.
    pub theory_rho: Option<f64>,
    pub mean_f2_1: f64,
    pub mean_f2_2: f64,
    pub mean_f_dcca: f64,
    pub sd_f2_1: f64,
    pub sd_f2_2: f64,
    pub sd_f_dcca: f64,
}

impl McStat {
    pub fn iqr(&self) -> f64 {
        self.q75 - self.q25
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub n: usize,
    pub reps: usize,
    pub nu: usize,
    pub mode: BoxMode,
    pub stats: Vec<McStat>,
}

/// Runs the study with parallel replications.
pub fn run_mc(config: &McConfig) -> Result<McSummary> {
    run_mc_with(config, true)
}

/// Sequential variant; output is identical to [`run_mc`].
pub fn run_mc_serial(config: &McConfig) -> Result<McSummary> {
    run_mc_with(config, false)
}

pub fn run_mc_with(config: &McConfig, parallel: bool) -> Result<McSummary> {
    config.validate()?;
    let rep_points = replicate(config, config.mode, parallel)?;
    summarize(config, config.mode, &rep_points)
}

type RepPoints = Vec<ProfilePoint<f64>>;

/// Runs the same replications (same per-rep series) under both box layouts.
/// Returns `(overlapping, non_overlapping)`.
pub fn compare_modes(config: &McConfig) -> Result<(McSummary, McSummary)> {
    let mut over_cfg = config.clone();
    over_cfg.mode = BoxMode::Overlapping;
    over_cfg.validate()?;
    let mut non_cfg = config.clone();
    non_cfg.mode = BoxMode::NonOverlapping;
    non_cfg.validate()?;

    let run_rep = |rep: usize| -> Result<(RepPoints, RepPoints)> {
        let pair = generate(&config.rep_spec(rep))?;
        let over = fluctuation_profile(&pair, &config.m_grid, config.nu, BoxMode::Overlapping)?;
        let non = fluctuation_profile(&pair, &config.m_grid, config.nu, BoxMode::NonOverlapping)?;
        Ok((over.points, non.points))
    };
    let results: Vec<_> = (0..config.reps)
        .into_par_iter()
        .map(run_rep)
        .collect::<Result<Vec<_>>>()?;
    let (over_points, non_points): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok((
        summarize(config, BoxMode::Overlapping, &over_points)?,
        summarize(config, BoxMode::NonOverlapping, &non_points)?,
    ))
}

fn replicate(
    config: &McConfig,
    mode: BoxMode,
    parallel: bool,
) -> Result<Vec<RepPoints>> {
    let run_rep = |rep: usize| -> Result<RepPoints> {
        let pair = generate(&config.rep_spec(rep))?;
        Ok(fluctuation_profile(&pair, &config.m_grid, config.nu, mode)?.points)
    };
    if parallel {
        (0..config.reps).into_par_iter().map(run_rep).collect()
    } else {
        (0..config.reps).map(run_rep).collect()
    }
}

fn summarize(
    config: &McConfig,
    mode: BoxMode,
    rep_points: &[Vec<ProfilePoint<f64>>],
) -> Result<McSummary> {
    let model = linear_process_cov(&config.scenario.theoretical_model()?);
    let mut stats = Vec::with_capacity(config.m_grid.len());
    for (mi, &m) in config.m_grid.iter().enumerate() {
        let mut rhos: Vec<f64> = Vec::with_capacity(rep_points.len());
        let mut f2_1 = Vec::with_capacity(rep_points.len());
        let mut f2_2 = Vec::with_capacity(rep_points.len());
        let mut fx = Vec::with_capacity(rep_points.len());
        for rep in rep_points {
            let pt = &rep[mi];
            debug_assert_eq!(pt.m, m);
            if let Some(r) = pt.rho {
                rhos.push(r);
            }
            f2_1.push(pt.f2_dfa_1);
            f2_2.push(pt.f2_dfa_2);
            fx.push(pt.f_dcca);
        }
        let excluded = rep_points.len() - rhos.len();
        rhos.sort_by(|a, b| a.partial_cmp(b).expect("rho is never NaN"));
        let (mean, sd) = mean_sd(&rhos);
        let (m1, s1) = mean_sd(&f2_1);
        let (m2, s2) = mean_sd(&f2_2);
        let (mx, sx) = mean_sd(&fx);
        let geometry = BoxGeometry::new(m, config.nu, mode)?;
        let theory_rho = rho_eps(&model, &geometry).ok();
        stats.push(McStat {
            m,
            q05: quantile(&rhos, 0.05),
            q25: quantile(&rhos, 0.25),
            median: quantile(&rhos, 0.50),
            q75: quantile(&rhos, 0.75),
            q95: quantile(&rhos, 0.95),
            mean,
            sd,
            effective: rhos.len(),
            excluded,
            theory_rho,
            mean_f2_1: m1,
            mean_f2_2: m2,
            mean_f_dcca: mx,
            sd_f2_1: s1,
            sd_f2_2: s2,
            sd_f_dcca: sx,
        });
    }
    Ok(McSummary { n: config.n, reps: config.reps, nu: config.nu, mode, stats })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Order-statistic quantile with linear interpolation on a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}
