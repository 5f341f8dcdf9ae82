//! Scenario runner: parses a flat JSON config, executes the requested
//! experiment and emits CSV. Identical configs produce byte-identical files.

mod config;
mod run;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "backflow",
    version,
    about = "Collision-model qubit dynamics runner"
)]
struct Cli {
    /// Output directory for emitted files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads for parameter scans (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for the randomized cross-checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config file.
    Run { config: PathBuf },
    /// Run the oracle cross-check suite.
    Validate,
}

/// Failure modes with their process exit codes.
pub enum Failure {
    /// Unparseable or constraint-violating configuration (exit 2).
    Config(String),
    /// A cross-check or scenario computation failed (exit 1).
    Validation(String),
    /// I/O failure, surfaced verbatim (exit 1).
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<backflow_core::Error> for Failure {
    fn from(e: backflow_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Scans stay deterministic regardless of the pool size: results are
        // collected in grid order.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Run { config } => run::run_scenario(config, &cli.out, cli.seed),
        Command::Validate => validate::run_all(cli.seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}
