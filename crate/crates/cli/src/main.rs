//! `rankone` — spherical functions, frame expansions, and growth
//! diagnostics on rank-one spaces, as reproducible CSV/JSON commands.
//!
//! Exit codes: 0 success, 2 validation (including argument parsing),
//! 3 excluded spectral parameter, 4 strict-mode classification failure,
//! 5 numerical failure. The worker-pool size is read from
//! `RANKONE_WORKERS` (default: all cores); output ordering never depends
//! on it.

mod commands;
mod manifest;
mod parse;

use clap::{Parser, Subcommand};
use commands::Failure;

#[derive(Parser)]
#[command(
    name = "rankone",
    version,
    about = "Spherical functions, frame expansions, and growth diagnostics on rank-one spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the basic invariants of a space as JSON.
    Space(commands::SpaceArgs),
    /// Evaluate the spherical function on a radius grid (CSV).
    Phi(commands::PhiArgs),
    /// Classify annulus-mass growth of a model eigenfunction (CSV + JSON).
    Annulus(commands::AnnulusArgs),
    /// Membership grid for the L^p eigenvalue region (CSV).
    Spectrum(commands::SpectrumArgs),
    /// Weighted sup functional along a radius grid (CSV + JSON).
    Hardy(commands::HardyArgs),
    /// Frame decomposition of the regular solution of one mode (CSV + JSON).
    Mode(commands::ModeArgs),
    /// Expansion weight c(lambda) on a parameter grid (CSV).
    Cfun(commands::CfunArgs),
}

fn init_workers() -> Result<(), Failure> {
    match std::env::var("RANKONE_WORKERS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                Failure::Validation(format!("RANKONE_WORKERS must be a positive integer, got `{raw}`"))
            })?;
            if n == 0 {
                return Err(Failure::Validation(
                    "RANKONE_WORKERS must be a positive integer, got `0`".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Numerical(format!("worker pool: {e}")))
        }
    }
}

fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Space(args) => commands::cmd_space(args),
        Command::Phi(args) => commands::cmd_phi(args),
        Command::Annulus(args) => commands::cmd_annulus(args),
        Command::Spectrum(args) => commands::cmd_spectrum(args),
        Command::Hardy(args) => commands::cmd_hardy(args),
        Command::Mode(args) => commands::cmd_mode(args),
        Command::Cfun(args) => commands::cmd_cfun(args),
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = init_workers().and_then(|()| run(&cli.command));
    if let Err(failure) = outcome {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}
