//! `kmono` — reproducible runs of the interpolation, counterexample,
//! estimation, and gap-experiment machinery, emitting CSV/JSON tables.

mod cmd_counterexample;
mod cmd_gap;
mod cmd_interpolate;
mod cmd_lse;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit codes are a stable contract: 0 success, 2 argument error,
/// 3 conditioning error, 4 verification failure, 5 solver failure.
#[derive(Debug)]
pub enum CliError {
    Core(kmono::Error),
    Io(std::io::Error),
    Usage(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(kmono::Error::Argument(_)) => 2,
            CliError::Core(kmono::Error::Domain(_)) => 2,
            CliError::Core(kmono::Error::Conditioning { .. }) => 3,
            CliError::Core(kmono::Error::NonConvergence { .. }) => 5,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<kmono::Error> for CliError {
    fn from(e: kmono::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "kmono",
    version,
    about = "Hermite spline interpolation errors, k-monotone least-squares \
             density estimation, and knot-gap Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output files (created if missing)
    #[arg(long, global = true, default_value = "./out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Hermite-interpolate a target on given nodes and report error norms
    Interpolate(cmd_interpolate::InterpolateArgs),
    /// Blow-up scan of the interpolation error's fifth derivative at zero
    Counterexample(cmd_counterexample::CounterexampleArgs),
    /// Fit the k-monotone least-squares density estimator
    Lse(cmd_lse::LseArgs),
    /// Monte Carlo knot-gap experiments near a point
    Gap(cmd_gap::GapArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Interpolate(args) => cmd_interpolate::run(args, &cli.out_dir),
        Command::Counterexample(args) => cmd_counterexample::run(args, &cli.out_dir),
        Command::Lse(args) => cmd_lse::run(args, &cli.out_dir),
        Command::Gap(args) => cmd_gap::run(args, &cli.out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect()
}
