//! `dimerwave <subcommand> --config path [--param k=v]... [--out dir]`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver non-convergence, 4 verification failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::OutputDir;

#[derive(Parser)]
#[command(name = "dimerwave", version, about = "Periodic traveling waves of dimer FPUT lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `material.kappa=3` or `task.eps=[0.1,0.2]`.
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    params: Vec<String>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Dispersion branches over a K grid (dispersion.csv).
    Dispersion,
    /// Critical frequency over a set of speeds (omegac.csv).
    Omegac,
    /// Linear data and kernel at one speed (lineardata.json).
    Kernel,
    /// One point of the bifurcating branch (point.json).
    Solve,
    /// A branch over an amplitude grid (branch.json).
    Branch,
    /// Long-wave family near the speed of sound (longwave.json).
    Longwave,
    /// Full invariant suite; exit 0 iff every criterion passes (verify.json).
    Verify,
    /// Residuals of a solved point in operator and lattice form (residuals.json).
    LatticeCheck,
}

/// Sizes the global pool from `DIMERWAVE_THREADS` when set.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DIMERWAVE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::config(format!("DIMERWAVE_THREADS: expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("DIMERWAVE_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    init_threads()?;
    let path = cli.config.ok_or_else(|| CliError::config("--config: a configuration file is required"))?;
    let mut config = config::load(&path, &cli.params)?;
    if let Some(dir) = cli.out {
        config.output.dir = dir;
    }
    let out = OutputDir::create(&config.output.dir)?;
    let ctx = commands::Context { config, out };
    match cli.command {
        Command::Dispersion => commands::dispersion(&ctx),
        Command::Omegac => commands::omegac(&ctx),
        Command::Kernel => commands::kernel(&ctx),
        Command::Solve => commands::solve(&ctx),
        Command::Branch => commands::branch(&ctx),
        Command::Longwave => commands::longwave(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::LatticeCheck => commands::lattice_check(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
