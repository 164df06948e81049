//! `estc`: batch runs of the solver from a JSON configuration.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::OutDir;

#[derive(Parser)]
#[command(name = "estc", version, about = "Electron spectra in counterpropagating plane waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Residuals R1..R4 over the ξ window (scan.csv, scan.json).
    Scan(Common),
    /// Refined doublet lines and their observables (doublet.json, scan.csv).
    GroundState(Common),
    /// Spin of the two-line superposition over time (spin.csv, doublet.json).
    Precession(Common),
    /// Checks of the closed-form single-wave solution (volkov.json).
    VolkovValidate(Common),
    /// Merge engine and banded solver against the dense nullspace (oracle.json).
    OracleCompare(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common, command): (_, _, fn(&RunConfig, &OutDir) -> Result<(), CliError>) = match cli.command {
        Command::Scan(c) => ("scan", c, commands::scan_command),
        Command::GroundState(c) => ("ground-state", c, commands::ground_state_command),
        Command::Precession(c) => ("precession", c, commands::precession_command),
        Command::VolkovValidate(c) => ("volkov-validate", c, commands::volkov_command),
        Command::OracleCompare(c) => ("oracle-compare", c, commands::oracle_command),
    };
    let config = RunConfig::load(&common.config)?;
    let out = OutDir::create(&common.out)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.jobs.unwrap_or(0)).build()?;
    let start = Instant::now();
    let result = pool.install(|| command(&config, &out));
    eprintln!("{name}: {:.3} s", start.elapsed().as_secs_f64());
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
