//! `symbreak`: batch runner for the symmetry-breaking experiments.
//!
//! ```text
//! symbreak [--config FILE] [--seed S] [--threads T] [--out-dir DIR] <fringe|detect|scaling|bcs> [overrides]
//! ```
//!
//! Values come from, in decreasing priority: command-line flags, the
//! `SYMBREAK_THREADS` environment variable (threads only), the config file,
//! built-in defaults. Exit status is 2 for a rejected configuration, 3 for a
//! numerical failure and 1 for I/O errors.

mod bcs;
mod config;
mod detect;
mod error;
mod fringe;
mod output;
mod scaling;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ConfigFile;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "symbreak", version, about = "Measurement-induced symmetry breaking experiments")]
struct Cli {
    /// JSON config with one object per experiment.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ensembles and the critical-current sum.
    #[arg(long, global = true, env = "SYMBREAK_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density profiles with and without interference fringes.
    Fringe {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        /// Relative phases, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        thetas: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// One detection sequence and a seeded ensemble of them.
    Detect {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        detections: Option<usize>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Fluctuation scans and fitted exponents.
    Scaling {
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        theorem_n_values: Option<Vec<usize>>,
    },
    /// BCS overlaps, critical current, current-phase relation, projection.
    Bcs {
        #[arg(long, allow_hyphen_values = true)]
        measured_theta: Option<f64>,
        #[arg(long)]
        projection_grid: Option<usize>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let out_dir = cli.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("symbreak-out"));
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let dir: &Path = &out_dir;

    match cli.command {
        Command::Fringe { n, t, thetas, points } => {
            let mut cfg = file.fringe.unwrap_or_default();
            set(&mut cfg.n, n);
            set(&mut cfg.t, t);
            set(&mut cfg.thetas, thetas);
            set(&mut cfg.points, points);
            pool.install(|| fringe::run(&cfg, seed, dir))
        }
        Command::Detect { n, detections, runs, t } => {
            let mut cfg = file.detect.unwrap_or_default();
            set(&mut cfg.n, n);
            set(&mut cfg.detections, detections);
            set(&mut cfg.runs, runs);
            set(&mut cfg.t, t);
            pool.install(|| detect::run(&cfg, seed, dir))
        }
        Command::Scaling { n_values, theorem_n_values } => {
            let mut cfg = file.scaling.unwrap_or_default();
            set(&mut cfg.n_values, n_values);
            set(&mut cfg.theorem_n_values, theorem_n_values);
            pool.install(|| scaling::run(&cfg, seed, dir))
        }
        Command::Bcs { measured_theta, projection_grid } => {
            let mut cfg = file.bcs.unwrap_or_default();
            set(&mut cfg.measured_theta, measured_theta);
            set(&mut cfg.projection_grid, projection_grid);
            pool.install(|| bcs::run(&cfg, seed, dir))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("symbreak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
