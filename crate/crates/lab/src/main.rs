use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thermolim::{run, Config, RunOptions, Subcommand};

/// Numerical laboratory for thermodynamic limits of trapped Bose gases.
#[derive(Debug, Parser)]
#[command(name = "thermolim", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Configuration file of `key = value` lines; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving the CSV tables and the JSON summary.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized trials, overriding the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => Config::from_path(path),
        None => Ok(Config::default()),
    };
    let result = config.map_err(thermolim::LabError::from).and_then(|config| {
        let report = run(cli.subcommand, &config, RunOptions { threads: cli.threads, seed: cli.seed })?;
        report.write(&cli.out)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for check in &report.checks {
                println!("{:<18} {}: {}", check.verdict.as_str(), check.name, check.detail);
            }
            let status = report.status();
            println!("{}: {}", cli.subcommand.name(), status.as_str());
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("thermolim {}: {e}", cli.subcommand.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
