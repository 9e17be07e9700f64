//! `wiretap`: error-rate curves, security gaps, HARQ, equivocation and
//! complexity figures as CSV/JSON data files.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{Config, CONFIG_HELP};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Result of a command: whether any simulated point ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    LowConfidence,
}

#[derive(Debug, Parser)]
#[command(name = "wiretap", version, about, after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file with `[section]` headers and `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `[sim] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `[sim] workers`; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides `[sim] max_frames`.
    #[arg(long, global = true)]
    max_frames: Option<u64>,
    /// Overrides `[sim] min_errors`.
    #[arg(long, global = true)]
    min_errors: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Bit/frame error curves: analytic for unitary and BCH codes, Monte Carlo for LDPC.
    Curve,
    /// Security gaps at the `[gap]` thresholds, with the bracketing samples.
    Gap,
    /// Bob and Eve frame error probabilities under soft-combining HARQ.
    Harq,
    /// Fractional equivocation rate at Bob's working points.
    Equivocation,
    /// Encoding and decoding operation counts.
    Complexity,
    /// Monte Carlo Bob/Eve curves for the configured scenario.
    Simulate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Curve => "curve",
            Command::Gap => "gap",
            Command::Harq => "harq",
            Command::Equivocation => "equivocation",
            Command::Complexity => "complexity",
            Command::Simulate => "simulate",
        }
    }
}

fn load(common: &Common) -> Result<(Config, String), CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let mut cfg = Config::parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if let Some(s) = common.seed {
        cfg.sim.seed = s;
    }
    if let Some(w) = common.workers {
        cfg.sim.workers = w;
    }
    if let Some(m) = common.max_frames {
        cfg.sim.max_frames = m;
    }
    if let Some(m) = common.min_errors {
        cfg.sim.min_errors = m;
    }
    Ok((cfg, text))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (cfg, text) = load(&cli.common)?;
    let mut out = output::OutputDir::create(&cli.common.out, cli.command.name(), &text)?;
    let outcome = match cli.command {
        Command::Curve => commands::curve(&cfg, &mut out)?,
        Command::Gap => commands::gap(&cfg, &mut out)?,
        Command::Harq => commands::harq(&cfg, &mut out)?,
        Command::Equivocation => commands::equivocation(&cfg, &mut out)?,
        Command::Complexity => commands::complexity(&cfg, &mut out)?,
        Command::Simulate => commands::simulate(&cfg, &mut out)?,
    };
    out.finish(outcome)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::LowConfidence) => {
            eprintln!("warning: frame budget exhausted before the error target at one or more points");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("wiretap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
