//! `bertrand`: verification suites and plot-ready data tables for the
//! deformed oscillator and Coulomb systems.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use error::CliError;

#[derive(Parser)]
#[command(name = "bertrand", version, about = "Superintegrable oscillator and Coulomb systems on curved spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form energy levels for a sweep of deformation parameters.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Bracket, rank, curvature and limit checks on sampled phase-space points.
    Verify(commands::verify::VerifyArgs),
    /// Integrate one orbit and report conserved-quantity drift and closure.
    Trajectory(commands::trajectory::TrajectoryArgs),
    /// Finite-difference radial eigenvalues against the closed forms.
    Radial(commands::radial::RadialArgs),
}

/// What a command found, after its output has been written.
pub enum Outcome {
    Success,
    /// The output is written but a check failed or the result is partial.
    Failed(String),
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Spectrum(args) => commands::spectrum::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Trajectory(args) => commands::trajectory::run(args),
        Command::Radial(args) => commands::radial::run(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(msg)) => {
            eprintln!("bertrand: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("bertrand: error: {e}");
            ExitCode::from(2)
        }
    }
}
