use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::Serialize;
use symbreak_core::bcs::{
    ab_critical_current, continuum_critical_current, josephson_current, measurement_outcome_distribution,
    overlap_decay_scan, sector_project, BcsModel, DecayScan, JunctionModel, SectorSuperposition,
};
use symbreak_core::numerics::wrap_angle;

use crate::config::BcsConfig;
use crate::error::{require, CliError};
use crate::output::Output;

#[derive(Serialize)]
struct ConvergenceRow {
    modes: usize,
    half_bandwidth: f64,
    j_s: f64,
    j_s_continuum: f64,
    j_s_ab: f64,
    ab_ratio: f64,
}

#[derive(Serialize)]
struct ProjectionSummary {
    measured_theta: f64,
    bin_theta: f64,
    sectors_before: usize,
    sectors_after: usize,
    distinct_relative_phases: usize,
    j_s: f64,
    expected_current: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    decay: &'a [DecayScan],
    convergence: &'a [ConvergenceRow],
    projection: ProjectionSummary,
}

pub fn run(cfg: &BcsConfig, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    require(cfg.gap > 0.0, || "bcs.gap must be positive".into())?;
    require(cfg.tunneling_sq > 0.0, || "bcs.tunneling_sq must be positive".into())?;
    let decay_base =
        BcsModel::uniform(cfg.decay_modes, cfg.decay_half_bandwidth, cfg.gap).map_err(CliError::invalid)?;
    require(cfg.replicas.len() >= 2, || "bcs.replicas needs at least 2 entries to fit a rate".into())?;
    require(cfg.replicas.iter().all(|&r| r >= 1), || "bcs.replicas entries must be positive".into())?;
    require(!cfg.dthetas.is_empty(), || "bcs.dthetas is empty".into())?;
    require(cfg.dthetas.iter().all(|&d| d.is_finite() && wrap_angle(d) != 0.0), || {
        "bcs.dthetas entries must be finite and nonzero mod 2π".into()
    })?;
    require(!cfg.convergence.is_empty(), || "bcs.convergence is empty".into())?;
    for p in &cfg.convergence {
        require(p.modes >= 1, || "bcs.convergence modes must be positive".into())?;
        require(p.half_bandwidth >= 10.0 * cfg.gap, || {
            format!("bcs.convergence half_bandwidth {} is below 10 gaps", p.half_bandwidth)
        })?;
    }
    require(cfg.current_points >= 2, || "bcs.current_points must be at least 2".into())?;
    require(cfg.projection_grid >= 1, || "bcs.projection_grid must be at least 1".into())?;
    require(cfg.measured_theta.is_finite(), || "bcs.measured_theta must be finite".into())?;

    let mut out = Output::create(out_dir, "bcs", seed, cfg)?;

    let decay = cfg
        .dthetas
        .iter()
        .map(|&d| overlap_decay_scan(&decay_base, &cfg.replicas, d))
        .collect::<symbreak_core::Result<Vec<_>>>()?;
    let mut body = String::from("dtheta,M,abs_overlap,ln_abs_overlap\n");
    for scan in &decay {
        for r in &scan.rows {
            body.push_str(&format!("{:.12e},{},{:.12e},{:.12e}\n", scan.dtheta, r.modes, r.magnitude, r.ln_magnitude));
        }
    }
    out.csv("overlap_decay.csv", &["|<theta|theta'>| for the base lead replicated M/base times".into()], &body)?;

    let mut convergence = Vec::new();
    for p in &cfg.convergence {
        let lead = BcsModel::uniform(p.modes, p.half_bandwidth, cfg.gap)?;
        let j = JunctionModel::symmetric(lead, cfg.tunneling_sq)?;
        let j_s = ab_critical_current(&j)?;
        let j_s_ab = j.ambegaokar_baratoff().expect("symmetric junction");
        convergence.push(ConvergenceRow {
            modes: p.modes,
            half_bandwidth: p.half_bandwidth,
            j_s,
            j_s_continuum: continuum_critical_current(&j),
            j_s_ab,
            ab_ratio: j_s / j_s_ab,
        });
    }
    let mut body = String::from("M,W_over_gap,J_S,J_S_continuum,J_S_AB,ab_ratio\n");
    for r in &convergence {
        body.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.modes,
            r.half_bandwidth / cfg.gap,
            r.j_s,
            r.j_s_continuum,
            r.j_s_ab,
            r.ab_ratio
        ));
    }
    out.csv("critical_current.csv", &["units e = hbar = 1; J_S_continuum is the band-limited integral".into()], &body)?;

    let j_s = convergence.last().expect("nonempty").j_s;
    let mut body = String::from("theta,current\n");
    for i in 0..cfg.current_points {
        let theta = TAU * i as f64 / (cfg.current_points - 1) as f64;
        body.push_str(&format!("{theta:.12e},{:.12e}\n", josephson_current(j_s, theta)));
    }
    out.csv("current_phase.csv", &[format!("J_S = {j_s:.12e} from the finest grid")], &body)?;

    let n = cfg.projection_grid;
    let step = TAU / n as f64;
    let state = SectorSuperposition::uniform_grid(n)?;
    let outcomes = measurement_outcome_distribution(&state, j_s, n)?;
    let mut body = String::from("theta,probability,current\n");
    for o in &outcomes {
        body.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", o.theta, o.probability, o.current));
    }
    out.csv("outcome_distribution.csv", &["before the measurement, uniform (theta_A, theta_B) grid".into()], &body)?;

    let bin = (wrap_angle(cfg.measured_theta) / step).round() as usize % n;
    let bin_theta = bin as f64 * step;
    let projected = sector_project(&state, bin_theta, step / 4.0)?;
    let mut body = String::from("theta_a,theta_b,relative_phase,mean_phase,probability\n");
    for s in projected.sectors() {
        body.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            s.theta_a,
            s.theta_b,
            s.relative_phase(),
            s.mean_phase(),
            s.weight.norm_sqr()
        ));
    }
    out.csv("projection.csv", &[format!("measured theta {} -> bin {bin_theta:.12e}", cfg.measured_theta)], &body)?;

    let mut bins: Vec<usize> =
        projected.sectors().iter().map(|s| (s.relative_phase() / step).round() as usize % n).collect();
    bins.sort_unstable();
    bins.dedup();
    let projection = ProjectionSummary {
        measured_theta: cfg.measured_theta,
        bin_theta,
        sectors_before: state.sectors().len(),
        sectors_after: projected.sectors().len(),
        distinct_relative_phases: bins.len(),
        j_s,
        expected_current: projected.expected_current(j_s),
    };
    out.json("bcs.json", &Report { decay: &decay, convergence: &convergence, projection })?;
    Ok(out.written)
}
