//! Command-line entry point: dataset generation, pipeline execution,
//! evaluation, ablations, network inspection and overlay rendering.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;
mod config;
mod records;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<urbannet::io::FormatError> for CliError {
    fn from(e: urbannet::io::FormatError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "urbannet",
    about = "Long-range monocular 3D vehicle detection: synthetic benchmark, lifting pipeline, evaluation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark dataset
    Generate(commands::generate::Args),
    /// Lift detections to 9-DOF 3D boxes against the road map
    Lift(commands::lift::Args),
    /// Evaluate lifted boxes against ground truth
    Eval(commands::eval::Args),
    /// Run the 3x3 map-noise / input ablation grid
    Ablate(commands::ablate::Args),
    /// Print the descriptor network architecture and parameter counts
    InspectNet(commands::inspect::Args),
    /// Render SVG overlays of ground-truth and predicted boxes
    Render(commands::render::Args),
}

fn run() -> Result<(), CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        // clap renders its own message; help/version are not errors.
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Lift(args) => commands::lift::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Ablate(args) => commands::ablate::run(args),
        Command::InspectNet(args) => commands::inspect::run(args),
        Command::Render(args) => commands::render::run(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
