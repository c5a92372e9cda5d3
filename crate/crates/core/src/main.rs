use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oco_core::experiment::{
    run_experiment, run_sweep, write_outcome, write_summary, ConfigError, ExperimentConfig, SweepConfig,
};
use oco_core::OcoError;

#[derive(Parser)]
#[command(name = "oco", version, about = "Adaptive online convex optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trace, metadata and report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a grid of experiments and write a scaling summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(OcoError),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<OcoError> for Failure {
    fn from(e: OcoError) -> Self {
        Failure::Runtime(e)
    }
}

fn read_config(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out_dir } => {
            let cfg = ExperimentConfig::from_json_str(&read_config(&config)?)?;
            let outcome = run_experiment(&cfg)?;
            for path in write_outcome(&outcome, &cfg, &out_dir)? {
                log::info!("wrote {}", path.display());
            }
            println!("dynamic_regret = {:.6}", outcome.metadata.dynamic_regret);
        }
        Command::Sweep { config, threads, out_dir } => {
            let cfg = SweepConfig::from_json_str(&read_config(&config)?)?;
            let summary = run_sweep(&cfg, threads, Some(&out_dir))?;
            write_summary(&summary, &out_dir.join(&cfg.summary))?;
            println!("slope = {:.6}", summary.slope);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("invalid config: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e @ OcoError::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
