//! Library side of the `dyson` binary: argument types, configuration and the
//! subcommand drivers. `main` only parses arguments and maps errors to exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dyson_core::verify::Fault;

use crate::config::{GridSpec, MeasureSpec, TimeList};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// A verification check failed (exit code 1).
    #[error("verification failed: {}", .0.join(", "))]
    Verification(Vec<String>),
    /// Numerical or I/O failure while running (exit code 3).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    /// Parameter errors become validation errors under `section.field`;
    /// anything else is a runtime failure.
    pub fn field(section: &str, e: dyson_core::Error) -> Self {
        match e {
            dyson_core::Error::InvalidParameter { field, reason } => {
                let path = if section.ends_with(field) {
                    section.to_string()
                } else {
                    format!("{section}.{field}")
                };
                CliError::Validation(format!("{path}: {reason}"))
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<dyson_core::Error> for CliError {
    fn from(e: dyson_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "dyson", version, about = "Dyson Brownian motion and its hydrodynamic limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the particle system and write trajectories and histograms.
    Simulate(SimulateArgs),
    /// Tabulate the limit density at given times.
    Density(DensityArgs),
    /// Support edges and breakdown points over a time range.
    Support(SupportArgs),
    /// Run the numerical verification checks.
    Verify(VerifyArgs),
    /// Simulate and compare against the limit density.
    Compare(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub measure: Option<MeasureSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: Common,
    /// `one_source`, `two_source:a=A` or `atoms:FILE`.
    #[arg(long)]
    pub measure: Option<MeasureSpec>,
    /// Comma-separated times.
    #[arg(long, allow_hyphen_values = true)]
    pub times: Option<TimeList>,
    /// `MIN:MAX:N`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub measure: Option<MeasureSpec>,
    /// `MIN:MAX:STEPS`
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// `all`, a suite name or a single check id.
    #[arg(long)]
    pub suite: Option<String>,
    /// Deliberate defect to inject; repeatable.
    #[arg(long)]
    pub inject: Vec<Fault>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Density(a) => commands::density(&a),
        Command::Support(a) => commands::support(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Compare(a) => commands::compare(&a),
    }
}
