//! The `score-select` command line.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 invalid flags or input
//! files, 3 runtime error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod check;
pub mod plot;
pub mod score;
pub mod simulate;

/// Environment variable capping the number of worker threads (0 = auto).
pub const THREADS_ENV: &str = "SCORE_SELECT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "score-select",
    version,
    about = "Bayesian model selection with the Hyvarinen score and Bayes factors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation study and write `<out>.csv` plus `<out>.manifest.json`.
    Simulate(simulate::SimulateArgs),
    /// Score candidate models on a data file and print a JSON report.
    Score(score::ScoreArgs),
    /// Run the numerical self-checks.
    Check(check::CheckArgs),
    /// Render a CSV produced by `simulate` as an SVG chart.
    Plot(plot::PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Box,
    Line,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Thread count from [`THREADS_ENV`]; `None` means let rayon decide.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(k) => Ok(Some(k)),
            Err(_) => Err(CliError::usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{v}'"
            ))),
        },
    }
}

pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate::cmd_simulate(&a),
        Command::Score(a) => score::cmd_score(&a),
        Command::Check(a) => check::cmd_check(&a),
        Command::Plot(a) => plot::cmd_plot(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
