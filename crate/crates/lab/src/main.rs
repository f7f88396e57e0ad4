use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dampwave_lab::config::ExperimentConfig;
use dampwave_lab::report::{exit_code, expected_table, summary};
use dampwave_lab::suite::{apply_seed, load_dir, run_all, write_outputs};
use dampwave_lab::EXIT_CONFIG;

#[derive(Parser)]
#[command(name = "dampwave", version, about = "Damped wave and degenerate heat decay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every `*.cfg` in a directory.
    Suite {
        dir: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the predicted decay exponents.
    Expected {
        #[arg(long = "N")]
        dim: usize,
        #[arg(long)]
        alpha: f64,
    },
}

fn execute(configs: Vec<ExperimentConfig>, out: &Path, workers: usize, seed: Option<u64>) -> ExitCode {
    let mut configs = configs;
    apply_seed(&mut configs, seed);
    let outcomes = match run_all(&configs, workers) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match write_outputs(out, &configs, &outcomes) {
        Ok(verdicts) => {
            print!("{}", summary(&verdicts));
            ExitCode::from(exit_code(&verdicts) as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed } => match ExperimentConfig::load(&config) {
            Ok(c) => execute(vec![c], &out, 1, seed),
            Err(e) => config_error(e),
        },
        Command::Suite { dir, out, workers, seed } => match load_dir(&dir) {
            Ok(c) => execute(c, &out, workers, seed),
            Err(e) => config_error(e),
        },
        Command::Expected { dim, alpha } => {
            if let Err(e) = dampwave_core::expected_exponents(dim, alpha) {
                return config_error(e);
            }
            print!("{}", expected_table(&[(dim, alpha)]));
            ExitCode::SUCCESS
        }
    }
}
