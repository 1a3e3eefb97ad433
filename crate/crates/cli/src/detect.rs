use std::path::{Path, PathBuf};

use symbreak_core::measurement::{ensemble_with, Detector, EnsembleBins, MIN_POINTS_PER_FRINGE};

use crate::config::DetectConfig;
use crate::error::{require, CliError};
use crate::output::Output;

/// One photo seeded with the master seed, then the ensemble whose run `i`
/// is seeded from `(master, i)`.
pub fn run(cfg: &DetectConfig, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = cfg.model.build()?;
    require(cfg.n >= 1, || "detect.n must be at least 1".into())?;
    require(cfg.detections <= 2 * cfg.n, || {
        format!("detect.detections = {} exceeds the 2N = {} atoms present", cfg.detections, 2 * cfg.n)
    })?;
    require(cfg.runs >= 1, || "detect.runs must be at least 1".into())?;
    require(cfg.points_per_fringe >= MIN_POINTS_PER_FRINGE, || {
        format!("detect.points_per_fringe must be at least {MIN_POINTS_PER_FRINGE}")
    })?;
    require(cfg.phase_bins >= 1 && cfg.position_bins >= 1, || "histograms need at least one bin".into())?;
    require(cfg.t.is_finite() && cfg.t >= 0.0, || format!("detect.t = {} must be a non-negative time", cfg.t))?;
    cfg.initial.build(cfg.n).map_err(CliError::invalid)?;
    let detector = Detector::new(&model, cfg.t, cfg.points_per_fringe).map_err(CliError::invalid)?;

    let mut out = Output::create(out_dir, "detect", seed, cfg)?;
    let single = detector.run(cfg.n, cfg.detections, cfg.initial, seed)?;
    out.json("run.json", &single)?;
    out.csv("run_positions.csv", &[], &single.positions_csv())?;
    out.csv("run_trajectory.csv", &[], &single.trajectory_csv())?;

    let bins = EnsembleBins { phase_bins: cfg.phase_bins, position_bins: cfg.position_bins };
    let report = ensemble_with(&detector, cfg.n, cfg.detections, cfg.runs, seed, bins)?;
    out.json("ensemble.json", &report)?;
    let undetermined = format!("runs without a phase: {}", report.phase_undetermined);
    out.csv("phase_histogram.csv", &[undetermined], &report.phase_histogram_csv())?;
    out.csv("density.csv", &["detected atoms per unit length, mean over runs".into()], &report.density_csv())?;
    out.csv("runs.csv", &[], &report.runs_csv())?;
    Ok(out.written)
}
