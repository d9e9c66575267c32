use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqdb_cli::{
    parse_distribution, render, run_experiment, CliError, Experiment, ExperimentConfig, OutputFormat,
};
use sqdb_core::{CostMode, TimePreset};

#[derive(Parser)]
#[command(name = "sqdb", version, about = "Single-query database experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover every coin with one spring-scale weighing.
    CoinWeigh(Opts),
    /// Find the one marked item among n = 2^p with one query.
    WalshSearch(Opts),
    /// One-query search with truncated Huffman codes.
    HuffmanSearch(Opts),
    /// Identify one of k candidate strings with a random linear code.
    RandomCode(Opts),
    /// Classical query lower bounds.
    Bounds(Opts),
    /// Quantum and classical running times.
    Cost(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum CostModeArg {
    Serial,
    ParallelXor,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Log,
    Linear,
    Quadratic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    n: Option<usize>,
    /// Alphabet size (prime).
    #[arg(long = "A")]
    modulus: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    exhaustive: bool,
    /// Probabilities inline ("0.5,0.25,0.25") or a file of whitespace-separated reals.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, value_enum, default_value = "serial")]
    cost_mode: CostModeArg,
    #[arg(long, value_enum, default_value = "linear")]
    t_preset: PresetArg,
    #[arg(long, value_enum, default_value = "json")]
    output: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(experiment: Experiment, opts: &Opts) -> Result<ExperimentConfig, CliError> {
    let mut c = ExperimentConfig::new(experiment);
    c.n = opts.n;
    c.modulus = opts.modulus;
    c.k = opts.k;
    c.l = opts.l;
    c.m = opts.m;
    c.seed = opts.seed;
    c.trials = opts.trials;
    c.exhaustive = opts.exhaustive;
    c.dist = opts.dist.as_deref().map(parse_distribution).transpose()?;
    c.cost_mode = match opts.cost_mode {
        CostModeArg::Serial => CostMode::SerialXor,
        CostModeArg::ParallelXor => CostMode::ParallelXor,
    };
    c.t_preset = match opts.t_preset {
        PresetArg::Log => TimePreset::Log { scale: 1.0 },
        PresetArg::Linear => TimePreset::Linear,
        PresetArg::Quadratic => TimePreset::Quadratic,
    };
    Ok(c)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (experiment, opts) = match &cli.command {
        Command::CoinWeigh(o) => (Experiment::CoinWeigh, o),
        Command::WalshSearch(o) => (Experiment::WalshSearch, o),
        Command::HuffmanSearch(o) => (Experiment::HuffmanSearch, o),
        Command::RandomCode(o) => (Experiment::RandomCode, o),
        Command::Bounds(o) => (Experiment::Bounds, o),
        Command::Cost(o) => (Experiment::Cost, o),
    };
    let outcome = run_experiment(&config(experiment, opts)?)?;
    let format = match opts.output {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    let text = render(&outcome.reports, format)?;
    match &opts.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(first) = outcome.violations.first() {
        for v in &outcome.violations {
            eprintln!("violation: {v}");
        }
        return Err(CliError::Invariant(format!(
            "{} violation(s), first: {first}",
            outcome.violations.len()
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sqdb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
