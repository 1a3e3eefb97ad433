use std::path::Path;

use symbreak_core::modes::{fringe_profile, no_fringe_profile, uniform_grid};

use crate::config::FringeConfig;
use crate::error::{require, CliError};
use crate::output::Output;

pub fn run(cfg: &FringeConfig, seed: u64, out_dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let model = cfg.model.build()?;
    require(cfg.n >= 1, || "fringe.n must be at least 1".into())?;
    require(cfg.points >= 2, || format!("fringe.points = {} is below 2", cfg.points))?;
    require(!cfg.thetas.is_empty(), || "fringe.thetas is empty".into())?;
    require(cfg.thetas.iter().all(|x| x.is_finite()), || "fringe.thetas must be finite".into())?;
    require(cfg.t.is_finite() && cfg.t >= 0.0, || format!("fringe.t = {} must be a non-negative time", cfg.t))?;

    let grid = uniform_grid(&model, cfg.t, cfg.points);
    let mut out = Output::create(out_dir, "fringe", seed, cfg)?;
    let base = no_fringe_profile(&model, cfg.n, cfg.t, &grid)?;
    out.csv("no_fringe.csv", &["number-state density N(|phi_A|^2 + |phi_B|^2)".into()], &base.to_csv())?;
    for (i, &theta) in cfg.thetas.iter().enumerate() {
        let p = fringe_profile(&model, cfg.n, theta, cfg.t, &grid)?;
        let notes = [format!("phase-state density, theta = {theta}"), format!("visibility = {:.12e}", p.visibility())];
        out.csv(&format!("fringe_{i:02}.csv"), &notes, &p.to_csv())?;
    }
    Ok(out.written)
}
