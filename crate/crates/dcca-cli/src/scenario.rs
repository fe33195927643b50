//! Scenario presets: shared between the command-line flags and the Monte
//! Carlo config file.

use clap::Args;
use dcca::simulate::Scenario;
use serde::Deserialize;

use crate::CliError;

pub const PRESETS: &[&str] = &[
    "iid_pair",
    "bivariate",
    "ar1_vs_ma1",
    "signal_plus_noise",
    "ma_cascade",
    "ar1_driven",
    "shared_ar",
    "shared_arma",
];

/// Optional per-scenario parameters; defaults are the values used in the
/// replication experiments.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub rho: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub noise_var: f64,
    pub phi: f64,
    pub q: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            rho: 0.5,
            beta0: 3.0,
            beta1: 2.0,
            noise_var: 4.0,
            phi: 0.6,
            q: 20,
            alpha1: 0.4,
            alpha2: 0.6,
            beta: 0.7,
        }
    }
}

pub fn build_scenario(name: &str, p: &ScenarioParams) -> Result<Scenario, CliError> {
    let scenario = match name {
        "iid_pair" => Scenario::IidGaussianPair,
        "bivariate" => Scenario::BivariateGaussian { rho: p.rho },
        "ar1_vs_ma1" => Scenario::Ar1VsMa1,
        "signal_plus_noise" => {
            Scenario::SignalPlusNoise { beta0: p.beta0, beta1: p.beta1, noise_var: p.noise_var }
        }
        "ma_cascade" => Scenario::MaCascade { q: p.q },
        "ar1_driven" => Scenario::Ar1Driven { phi: p.phi },
        "shared_ar" => Scenario::SharedNoiseAr { alpha1: p.alpha1, alpha2: p.alpha2, beta: p.beta },
        "shared_arma" => {
            Scenario::SharedNoiseArma { alpha1: p.alpha1, alpha2: p.alpha2, beta: p.beta }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown scenario '{other}'; valid presets: {}",
                PRESETS.join(", ")
            )))
        }
    };
    scenario.validate().map_err(CliError::from)?;
    Ok(scenario)
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario preset name
    #[arg(long)]
    pub scenario: String,
    /// Correlation of the bivariate preset
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub noise_var: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Order of the moving-average cascade
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl ScenarioArgs {
    pub fn build(&self) -> Result<Scenario, CliError> {
        let mut p = ScenarioParams::default();
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.beta0 {
            p.beta0 = v;
        }
        if let Some(v) = self.beta1 {
            p.beta1 = v;
        }
        if let Some(v) = self.noise_var {
            p.noise_var = v;
        }
        if let Some(v) = self.phi {
            p.phi = v;
        }
        if let Some(v) = self.q {
            p.q = v;
        }
        if let Some(v) = self.alpha1 {
            p.alpha1 = v;
        }
        if let Some(v) = self.alpha2 {
            p.alpha2 = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        build_scenario(&self.scenario, &p)
    }
}

/// Monte Carlo run configuration (TOML).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McFileConfig {
    pub scenario: String,
    #[serde(flatten)]
    pub params: ScenarioParams,
    pub n: usize,
    pub reps: usize,
    #[serde(default = "default_m_min")]
    pub m_min: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default)]
    pub nu: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub seed: u64,
    /// Run both box layouts on the same replications.
    #[serde(default)]
    pub compare_modes: bool,
    /// Polynomial trend coefficients added to each generated series.
    #[serde(default)]
    pub trend1: Option<Vec<f64>>,
    #[serde(default)]
    pub trend2: Option<Vec<f64>>,
}

fn default_m_min() -> usize {
    3
}

fn default_m_max() -> usize {
    100
}

fn default_mode() -> String {
    "overlap".to_string()
}

impl McFileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid mc config: {e}")))
    }

    pub fn mode(&self) -> Result<dcca::BoxMode, CliError> {
        match self.mode.as_str() {
            "overlap" => Ok(dcca::BoxMode::Overlapping),
            "nonoverlap" => Ok(dcca::BoxMode::NonOverlapping),
            other => Err(CliError::usage(format!(
                "invalid mode '{other}' (expected overlap or nonoverlap)"
            ))),
        }
    }
}
