//! Sweep runner: loads a TOML config, runs the Monte Carlo comparison,
//! and writes a CSV or JSON-lines table.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad flags, bad
//! config file), 1 on runtime failures such as an unwritable output.

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use trihybrid::config::ExperimentConfig;
use trihybrid::precoder::PowerConstraintMode;
use trihybrid::sweep::{run_sweep, write_results_file, EmitOptions, OutputFormat};
use trihybrid::Error;

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    about = "Monte Carlo sweep of spectral and energy efficiency across transmitter architectures",
    version
)]
struct Cli {
    /// Path to the TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output file for the result table.
    #[arg(long)]
    out: PathBuf,

    /// Table format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json-lines"])]
    format: String,

    /// Master seed override.
    #[arg(long, env = "SIMULATE_SEED")]
    seed: Option<u64>,

    /// Trial count override.
    #[arg(long, env = "SIMULATE_TRIALS")]
    trials: Option<usize>,

    /// Comma-separated architecture list override, e.g. "TH,HP,FD".
    #[arg(long)]
    arch: Option<String>,

    /// Power constraint mode override.
    #[arg(long, value_parser = ["aip", "aop"])]
    power_mode: Option<String>,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("{}: {e}", cli.config.display())))?;
    let mut config = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.n_trials = trials;
    }
    if let Some(list) = &cli.arch {
        config.architectures = list.split(',').map(|s| s.trim().to_string()).collect();
    }
    if let Some(mode) = &cli.power_mode {
        config.power_mode = mode.parse::<PowerConstraintMode>()?;
    }
    // surface validation problems before any work happens
    config.build()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(2);
        }
    };

    let format: OutputFormat = cli.format.parse().expect("validated by clap");
    let options = EmitOptions {
        format,
        include_stderr: config.output.include_stderr,
    };

    let result = match run_sweep(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_results_file(&result, &options, &cli.out) {
        eprintln!("simulate: {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    eprintln!(
        "simulate: wrote {} rows ({} architectures x {} power points, {} trials) to {}",
        result.rows.len(),
        config.architectures.len(),
        config.input_power_grid_w.len(),
        config.n_trials,
        cli.out.display()
    );
    ExitCode::SUCCESS
}
