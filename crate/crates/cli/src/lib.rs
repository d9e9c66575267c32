//! Seeded experiment runner: pairs each quantum algorithm with its
//! classical baseline, sweeps databases, and reports predicted next to
//! observed numbers.

mod experiments;
pub mod report;

use std::fs;
use std::path::Path;

use sqdb_core::{CostMode, TimePreset};

pub use report::{render, OutputFormat, Report, TranscriptSummary};

/// Largest trial count accepted for one run.
pub const MAX_TRIALS: u64 = 10_000_000;

/// Largest database swept exhaustively by `coin-weigh`.
pub const MAX_EXHAUSTIVE_COINS: usize = 16;

/// Tolerance on the sum of a user-supplied distribution.
pub const DIST_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<sqdb_core::Error> for CliError {
    fn from(e: sqdb_core::Error) -> Self {
        match e {
            sqdb_core::Error::Resource(_) => CliError::Resource(e.to_string()),
            sqdb_core::Error::Invariant(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CoinWeigh,
    WalshSearch,
    HuffmanSearch,
    RandomCode,
    Bounds,
    Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Option<usize>,
    pub modulus: Option<u32>,
    pub k: Option<usize>,
    pub l: Option<u32>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub exhaustive: bool,
    pub dist: Option<Vec<f64>>,
    pub cost_mode: CostMode,
    pub t_preset: TimePreset,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            n: None,
            modulus: None,
            k: None,
            l: None,
            m: None,
            seed: None,
            trials: None,
            exhaustive: false,
            dist: None,
            cost_mode: CostMode::SerialXor,
            t_preset: TimePreset::Linear,
        }
    }

    pub(crate) fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Usage("--n is required".into()))
    }

    pub(crate) fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("--seed is required when trials are sampled".into()))
    }

    pub(crate) fn checked_trials(&self, default: u64) -> Result<u64, CliError> {
        let trials = self.trials.unwrap_or(default);
        if trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        if trials > MAX_TRIALS {
            return Err(CliError::Resource(format!("--trials {trials} exceeds {MAX_TRIALS}")));
        }
        Ok(trials)
    }
}

/// Reports plus any invariant violations seen while producing them.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub violations: Vec<String>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    match config.experiment {
        Experiment::CoinWeigh => experiments::coin_weigh(config),
        Experiment::WalshSearch => experiments::walsh_search(config),
        Experiment::HuffmanSearch => experiments::huffman_search(config),
        Experiment::RandomCode => experiments::random_code(config),
        Experiment::Bounds => experiments::bounds(config),
        Experiment::Cost => experiments::cost(config),
    }
}

/// Reads `--dist`: a file of whitespace-separated reals if the argument
/// names one, otherwise an inline list separated by commas or whitespace.
/// The sum must be within [`DIST_SUM_TOLERANCE`] of 1; the result is
/// renormalized.
pub fn parse_distribution(arg: &str) -> Result<Vec<f64>, CliError> {
    let text = if Path::new(arg).is_file() { fs::read_to_string(arg)? } else { arg.to_string() };
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad probability {t:?} in --dist")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("--dist is empty".into()));
    }
    if values.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(CliError::Usage("--dist entries must be non-negative".into()));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > DIST_SUM_TOLERANCE {
        return Err(CliError::Usage(format!("--dist sums to {sum}, not 1")));
    }
    Ok(values.into_iter().map(|p| p / sum).collect())
}
