//! Command-line front end: rotate loading matrices, run the simulation study,
//! print the built-in example.
//!
//! Exit codes: 0 success, 1 bad input or arguments, 2 numerical failure.

mod commands;
pub mod matrix_io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{run_example, run_rotate, run_simulate};

/// Seed used when neither `--seed` nor `ROTAFACTOR_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Omt,
    Ot,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "rotafactor", version, about = "Oblique mean-target and target rotation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotate an unrotated loading matrix towards a target.
    Rotate(RotateArgs),
    /// Run the Monte-Carlo study over a preset or a conditions file.
    Simulate(SimulateArgs),
    /// Rotate the built-in 18 x 3 example by both methods.
    Example,
}

#[derive(Debug, Args)]
pub struct RotateArgs {
    /// Unrotated loadings (CSV, variables x factors).
    #[arg(long)]
    pub loadings: PathBuf,
    /// 0/1 target pattern (CSV, same shape as the loadings).
    #[arg(long, conflicts_with = "icm", required_unless_present = "icm")]
    pub target: Option<PathBuf>,
    /// Use the contiguous block target; needs --q.
    #[arg(long, requires = "q")]
    pub icm: bool,
    /// Number of factors of the block target.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = 20.0)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub ridge_step: f64,
    #[arg(long, default_value_t = 100)]
    pub max_ridge_iters: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Also write each rotated pattern in full precision to
    /// `<DIR>/pattern_<method>.csv`.
    #[arg(long, value_name = "DIR")]
    pub write_pattern: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// paper-table2, paper-tableA1 or paper-all.
    #[arg(long, conflicts_with = "conditions", required_unless_present = "conditions")]
    pub preset: Option<String>,
    /// Conditions CSV with columns n,q,per_factor,level,rho.
    #[arg(long)]
    pub conditions: Option<PathBuf>,
    #[arg(long, default_value_t = rotafactor_core::simulation::DEFAULT_REPLICATIONS)]
    pub reps: usize,
    #[arg(long, env = "ROTAFACTOR_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub parallelism: usize,
    /// Output directory (created if missing).
    #[arg(long, default_value = "rotafactor-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

/// Parses `args` (including the program name) and runs the command, writing
/// normal output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Rotate(a) => run_rotate(a, out),
        Command::Simulate(a) => run_simulate(a, out),
        Command::Example => run_example(out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
