//! `dal` — dropout-based active learning for regression.
//!
//! Subcommands: `run` an experiment from a config file, `diagnose` a trained
//! checkpoint's uncertainty/error relation, `profile` results across runs,
//! and `gen-rosenbrock` for synthetic data.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// A failed invocation: usage/config problems exit 2, runtime failures 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<dal_core::Error> for Failure {
    fn from(e: dal_core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "dal", version, about = "Dropout-based active learning for regression")]
struct Cli {
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an active-learning experiment from a TOML config.
    Run {
        /// Experiment configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: $DAL_OUT_ROOT/<config>-<timestamp>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override experiment.replicates.
        #[arg(long)]
        replicates: Option<usize>,
        /// Override experiment.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Relate a checkpoint's MC-dropout uncertainty to its test error.
    Diagnose {
        /// Network checkpoint produced by `run`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Evaluation dataset (CSV with a header row).
        #[arg(long)]
        data: PathBuf,
        /// Target column name.
        #[arg(long)]
        target: String,
        /// CSV delimiter.
        #[arg(long)]
        delimiter: Option<String>,
        /// Number of stochastic runs per point (minimum 2).
        #[arg(short = 't', long, default_value_t = 25)]
        runs: usize,
        /// MC dropout probability (default: the checkpoint's training value).
        #[arg(long)]
        dropout: Option<f64>,
        /// Base seed for the MC streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for diagnostic.csv / diagnostic.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate run results into Dolan-More performance profiles.
    Profile {
        /// Run directories, metrics.csv files, or problem/algorithm/error tables.
        inputs: Vec<PathBuf>,
        /// Error metric to profile (rmse, mae, maxae).
        #[arg(long, default_value = "rmse")]
        metric: String,
        /// Output directory for profile.csv / profile_auc.csv / profile.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic Rosenbrock regression dataset as CSV.
    GenRosenbrock {
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        dim: usize,
        /// Lower edge of the sampling box.
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        lo: f64,
        /// Upper edge of the sampling box.
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            replicates,
            seed,
        } => commands::run::execute(&config, out, replicates, seed),
        Command::Diagnose {
            checkpoint,
            data,
            target,
            delimiter,
            runs,
            dropout,
            seed,
            out,
        } => commands::diagnose::execute(
            &checkpoint,
            &data,
            &target,
            delimiter.as_deref(),
            runs,
            dropout,
            seed,
            out,
        ),
        Command::Profile { inputs, metric, out } => {
            commands::profile::execute(&inputs, &metric, out)
        }
        Command::GenRosenbrock {
            samples,
            dim,
            lo,
            hi,
            seed,
            out,
        } => commands::gen::execute(samples, dim, lo, hi, seed, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
