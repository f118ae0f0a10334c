use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;

use config::{Overrides, RunConfig};
use error::CliError;

/// Equilibrium statistics of a one-dimensional nearest-neighbour chain.
#[derive(Parser, Debug)]
#[command(name = "chainstat", version)]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (CSV or JSON report); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for all random streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of the quadrature
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean spacing against temperature, with the low-temperature slope fit
    SweepTemperature,
    /// Mean spacing against applied force, with the elastic modulus
    SweepForce,
    /// Sample chains; writes CSV, a provenance sidecar and a summary
    Sample,
    /// Spread X/(Na) of the harmonic chain for a tail model
    HarmonicDemo,
    /// Run all consistency checks
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    let overrides = Overrides {
        seed: cli.seed,
        rel_tol: cli.tol,
        output: cli.out,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::SweepTemperature => commands::sweep_temperature(&cfg),
        Command::SweepForce => commands::sweep_force(&cfg),
        Command::Sample => commands::sample(&cfg),
        Command::HarmonicDemo => commands::harmonic_demo(&cfg),
        Command::Validate => commands::validate(&cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chainstat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
