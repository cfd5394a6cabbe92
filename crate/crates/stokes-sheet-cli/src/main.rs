mod commands;
mod config;
mod error;
mod output;
mod validate;

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stokes_sheet::FluidParams;

use crate::config::RunConfig;
use crate::error::CliError;

/// Periodic two-phase Stokes interface simulator.
#[derive(Debug, Parser)]
#[command(name = "stokes-sheet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an interface; writes timeseries.csv and snapshots/.
    Simulate(RunArgs),
    /// Flat-state spectrum, analytic against numeric; writes spectrum.csv.
    Spectrum(RunArgs),
    /// Continue a bifurcation branch; writes branch.csv.
    Branch(RunArgs),
    /// Bulk velocity and pressure on a grid; writes fields.csv.
    Fields(RunArgs),
    /// Run the built-in oracle suite.
    Validate {
        /// Optional config whose fluid parameters drive the spectral checks.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write validate.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_validate(config: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let params = match config {
        Some(path) => RunConfig::load(path)?.params(),
        None => FluidParams::with_theta(2.0, 1.0, 1.0, 0.5)?,
    };
    let checks = validate::run(&params)?;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status}  {:<52} value {:>10.3e}  tol {:.0e}", c.name, c.value, c.tol);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(e.into()))?;
        output::write_json(&dir.join("validate.json"), &serde_json::json!({ "checks": checks }))?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::Validation {
            failed,
            total: checks.len(),
        });
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&RunConfig::load(&a.config)?, &a.out),
        Command::Spectrum(a) => commands::spectrum(&RunConfig::load(&a.config)?, &a.out),
        Command::Branch(a) => commands::branch(&RunConfig::load(&a.config)?, &a.out),
        Command::Fields(a) => commands::fields(&RunConfig::load(&a.config)?, &a.out),
        Command::Validate { config, out } => run_validate(config.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stokes-sheet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
