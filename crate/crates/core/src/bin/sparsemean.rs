use std::io::{stderr, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparsemean::experiment::{cmd_diagnose, cmd_estimate, cmd_simulate, DiagnoseMode, DiagnoseParams, SimulateOptions};

#[derive(Parser)]
#[command(name = "sparsemean", version, about = "Robust sparse mean estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean of one data file (CSV or binary).
    Estimate {
        #[arg(long)]
        data: PathBuf,
        /// Estimator config JSON.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run seeded trials from an experiment config and write a CSV table.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overrides output_path; `-` for stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write runtime_ms as 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run a diagnostic oracle (stability, regularity or xk) on a data file.
    Diagnose {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        mode: DiagnoseMode,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Reference mean as comma-separated values; the origin by default.
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (stdout().lock(), stderr().lock());
    let code = match cli.command {
        Command::Estimate { data, config } => cmd_estimate(&data, &config, &mut out, &mut err),
        Command::Simulate { config, jobs, output, no_timing } => {
            let seed = match std::env::var("SPARSEMEAN_SEED").ok().map(|s| s.parse::<u64>()) {
                None => None,
                Some(Ok(s)) => Some(s),
                Some(Err(e)) => {
                    eprintln!("error: SPARSEMEAN_SEED: {e}");
                    return ExitCode::from(1);
                }
            };
            let opts = SimulateOptions { jobs, output, seed, no_timing };
            cmd_simulate(&config, &opts, &mut out, &mut err)
        }
        Command::Diagnose { data, mode, k, eps, delta, sigma, a, alpha, mu } => {
            let params = DiagnoseParams { k, eps, delta, sigma, a, alpha, mu };
            cmd_diagnose(&data, mode, &params, &mut out, &mut err)
        }
    };
    ExitCode::from(code as u8)
}
