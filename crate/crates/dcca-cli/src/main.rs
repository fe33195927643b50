//! Command-line frontend: estimation over CSV inputs, population theory
//! tables, process simulation, Monte Carlo sweeps and the multi-asset
//! log-return pipeline. Emits plot-ready CSV or JSON.

mod commands;
mod data;
mod output;
mod scenario;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcca::BoxMode;

use crate::output::OutputSink;
use crate::scenario::ScenarioArgs;

/// Exit codes: 0 success, 1 data error, 2 usage/config error.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// Library errors map to a data error unless they are configuration-shaped.
impl From<dcca::Error> for CliError {
    fn from(e: dcca::Error) -> Self {
        use dcca::Error::*;
        let code = match e {
            InvalidGeometry { .. } | OrderCap { .. } | UnsupportedOrder { .. }
            | InvalidParameter { .. } => 2,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Overlap,
    Nonoverlap,
}

impl From<Mode> for BoxMode {
    fn from(m: Mode) -> BoxMode {
        match m {
            Mode::Overlap => BoxMode::Overlapping,
            Mode::Nonoverlap => BoxMode::NonOverlapping,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output file; "-" writes to stdout
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Smallest box parameter m
    #[arg(long, default_value_t = 3)]
    pub m_min: usize,
    /// Largest box parameter m
    #[arg(long, default_value_t = 100)]
    pub m_max: usize,
    /// Detrending order nu (fit degree is nu + 1)
    #[arg(long, default_value_t = 0)]
    pub nu: usize,
}

impl GridArgs {
    pub fn grid(&self) -> Result<Vec<usize>, CliError> {
        if self.m_min < 2 || self.m_max < self.m_min {
            return Err(CliError::usage(format!(
                "invalid grid: m_min={} m_max={}",
                self.m_min, self.m_max
            )));
        }
        Ok((self.m_min..=self.m_max).collect())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dcca",
    about = "Detrended fluctuation and cross-correlation analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Band-weight coefficients alpha_j and beta_j of the detrending kernel
    Alpha {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Use the order-zero closed forms instead of the kernel sums
        #[arg(long)]
        closed_form: bool,
        /// Cross-check closed forms against kernel sums (order zero only)
        #[arg(long)]
        check: bool,
    },
    /// DFA/DCCA profile of a two-column numeric CSV (use "-" for stdin)
    Dcca {
        /// Input CSV with a header and two numeric columns
        input: String,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Mode::Overlap)]
        mode: Mode,
    },
    /// Population quantities of a scenario preset over a grid of box sizes
    Theory {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also emit fluctuation covariances for lags 0..=LAGS
        #[arg(long)]
        lags: Option<usize>,
    },
    /// Generate a series pair from a scenario preset
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Sample length
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Master seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trend polynomial added to x1: comma-separated coefficients,
        /// constant term first
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        trend1: Option<Vec<f64>>,
        /// Trend polynomial added to x2
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        trend2: Option<Vec<f64>>,
    },
    /// Monte Carlo sweep driven by a TOML config file
    Mc {
        /// Path to the run configuration
        #[arg(long)]
        config: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pairwise DFA/DCCA profiles of aligned log-returns from price CSVs
    Empirical {
        /// Price files: header row, ISO-8601 date column then a price column
        files: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Mode::Overlap)]
        mode: Mode,
        /// Return transform
        #[arg(long, value_enum, default_value_t = Transform::LogReturn)]
        transform: Transform,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    LogReturn,
    AbsLogReturn,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Alpha { common, grid, closed_form, check } => {
            commands::alpha(&grid, closed_form, check).and_then(|t| emit(t, &common))
        }
        Command::Dcca { input, common, grid, mode } => {
            commands::dcca_profile(&input, &grid, mode.into()).and_then(|t| emit(t, &common))
        }
        Command::Theory { common, grid, scenario, lags } => {
            commands::theory(&scenario, &grid, lags).and_then(|t| emit(t, &common))
        }
        Command::Simulate { common, scenario, n, seed, trend1, trend2 } => {
            commands::simulate(&scenario, n, seed, trend1, trend2).and_then(|t| emit(t, &common))
        }
        Command::Mc { config, common } => {
            commands::monte_carlo(&config).and_then(|t| emit(t, &common))
        }
        Command::Empirical { files, common, grid, mode, transform } => {
            commands::empirical(&files, &grid, mode.into(), transform).and_then(|t| emit(t, &common))
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}

fn emit(table: output::Table, common: &CommonArgs) -> Result<(), CliError> {
    let mut sink = OutputSink::open(&common.out)?;
    match common.format {
        Format::Csv => table.write_csv(&mut sink),
        Format::Json => table.write_json(&mut sink),
    }
}
