//! `lifted-sde`: batch front end for simulation and verification runs.

mod config;
mod hermite_cmd;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("config: {0}")]
    Parse(String),
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("replication {replication}: {source}")]
    Solver {
        replication: u64,
        #[source]
        source: lifted_sde::Error,
    },
    #[error("check {check}: {source}")]
    Check {
        check: String,
        #[source]
        source: lifted_sde::Error,
    },
    #[error(transparent)]
    Library(#[from] lifted_sde::Error),
}

#[derive(Parser)]
#[command(name = "lifted-sde", version, about = "Simulate and verify SDEs with lifted coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve replications and write paths, a summary and any configured checks.
    Simulate(RunArgs),
    /// Run the configured checks and write their reports.
    Verify(RunArgs),
    /// Hermite utilities.
    #[command(subcommand)]
    Hermite(hermite_cmd::HermiteCommand),
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| CliError::Invalid {
                field: "--threads".into(),
                message: e.to_string(),
            })?;
    }
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(r) = args.replications {
        config.replications = r;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => load(args).and_then(|c| run::simulate(&c, &args.out)).map(Some),
        Command::Verify(args) => load(args).and_then(|c| run::verify(&c, &args.out)).map(Some),
        Command::Hermite(cmd) => hermite_cmd::run(cmd).map(|_| None),
    };
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(outcome)) => {
            for r in &outcome.reports {
                let status = match (r.pass, r.negative_control, r.report_only) {
                    (true, _, _) => "pass",
                    (false, true, _) => "fail (negative control)",
                    (false, _, true) => "fail (report only)",
                    _ => "FAIL",
                };
                eprintln!("{:<20} {status}", r.id);
            }
            if outcome.checks_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
