//! `qledger`: run the battery examples, evaluate ledgers for state files,
//! audit the second law on random Gibbs-preserving channels and plot CSVs.
//!
//! Failures go to stderr as `{"error": code, "detail": ...}`; the exit code
//! is 2 for invalid input, 3 for numerical failure and 4 when a checked
//! property does not hold.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qledger_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "qledger",
    version,
    about = "Thermodynamic ledgers for open quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-qubit battery in a common Lorentzian bath; writes the measure CSV.
    Example1(Common),
    /// Two-qubit battery charged through one photon (case 1 or 2).
    Example2(Common),
    /// Energy and entropy ledger for a process given as JSON.
    Ledger(Common),
    /// Second-law and closure audit over random Gibbs-preserving channels.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Use channels built to violate the second law and require at least
        /// one negative irreversible entropy change.
        #[arg(long)]
        expect_violation: bool,
    },
    /// Line plot of columns of a measure CSV.
    Plot {
        /// CSV written by `example1` or `example2`.
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, default_value = "P")]
        columns: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=value`, applied after the config file. Values are parsed as JSON
    /// and fall back to plain strings.
    #[arg(long = "override", value_name = "K=V")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
    /// A checked identity or inequality failed.
    Property(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
            CliError::Property(_) => "property_violation",
        }
    }

    fn detail(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(s) | CliError::Usage(s) | CliError::Property(s) => s.clone(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Validation(_) | Error::Parameter(_)) => 2,
            CliError::Core(Error::Numeric(_) | Error::StepSize(_) | Error::SupportViolation(_)) => {
                3
            }
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Property(_) => 4,
        }
    }
}

fn report(err: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": err.code(), "detail": err.detail() });
    eprintln!("{body}");
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&CliError::Usage(e.to_string().trim().to_string())),
    };
    let result = match cli.command {
        Command::Example1(common) => commands::example1(&common),
        Command::Example2(common) => commands::example2(&common),
        Command::Ledger(common) => commands::ledger(&common),
        Command::Audit {
            common,
            expect_violation,
        } => commands::audit(&common, expect_violation),
        Command::Plot { csv, columns, svg } => commands::plot(&csv, &columns, svg.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
