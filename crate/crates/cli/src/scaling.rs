use std::path::{Path, PathBuf};

use serde::Serialize;
use symbreak_core::bcs::BcsModel;
use symbreak_core::fluctuation::{
    bcs_pair_current_family, fit_scan, scaling_scan, BranchSuperposition, LocalOperatorSum, Moments, PairCurrentFamily,
    PairProfile, ProductState, ScanResult,
};
use symbreak_core::fock::{expectation_and_variance, number_state, phase_state, smeared_density_variance};
use symbreak_core::modes::eval_pair;
use symbreak_core::{QuadraticOperator, C64};

use crate::config::ScalingConfig;
use crate::error::{require, CliError};
use crate::output::Output;

#[derive(Serialize)]
struct Exponent {
    family: &'static str,
    quantity: &'static str,
    slope: Option<f64>,
    intercept: Option<f64>,
    points: usize,
}

fn exponent(family: &'static str, quantity: &'static str, scan: &ScanResult) -> Exponent {
    Exponent { family, quantity, slope: scan.slope, intercept: scan.intercept, points: scan.rows.len() }
}

fn check_list(name: &str, values: &[usize]) -> Result<(), CliError> {
    require(values.len() >= 3, || format!("scaling.{name} needs at least 3 values to fit, got {}", values.len()))?;
    require(values.iter().all(|&v| v >= 1), || format!("scaling.{name} entries must be positive"))
}

pub fn run(cfg: &ScalingConfig, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = cfg.model.build()?;
    check_list("n_values", &cfg.n_values)?;
    check_list("theorem_n_values", &cfg.theorem_n_values)?;
    check_list("pair_modes", &cfg.pair_modes)?;
    require(cfg.cell_volume > 0.0, || "scaling.cell_volume must be positive".into())?;
    require(cfg.t.is_finite() && cfg.t >= 0.0, || format!("scaling.t = {} must be a non-negative time", cfg.t))?;
    require(cfg.pair_coupling != 0.0, || "scaling.pair_coupling must be nonzero".into())?;
    require((cfg.pair_theta_a - cfg.pair_theta_b).sin().abs() > 1e-6, || {
        "pair phases with sin(theta_a - theta_b) = 0 carry no mean current".into()
    })?;
    let (pa, pb) = eval_pair(&model, cfg.position, cfg.t).map_err(CliError::invalid)?;
    require(pa.norm_sqr() + pb.norm_sqr() > 0.0, || "orbitals vanish at scaling.position".into())?;
    BcsModel::uniform(cfg.pair_modes[0], cfg.half_bandwidth, cfg.gap).map_err(CliError::invalid)?;

    let mut out = Output::create(out_dir, "scaling", seed, cfg)?;
    let mut exponents = Vec::new();
    let dv = cfg.cell_volume;

    // shot noise of the cell count in a phase state, contact term included
    let points = cfg
        .n_values
        .iter()
        .map(|&n| {
            let v = smeared_density_variance(pa, pb, dv, &phase_state(n, cfg.theta)?)?;
            Ok((n, v.mean, v.total))
        })
        .collect::<symbreak_core::Result<Vec<_>>>()?;
    let scan = fit_scan(&points)?;
    out.csv(
        "density_phase.csv",
        &["cell count in a phase state; variance includes the contact term".into()],
        &scan.to_csv(),
    )?;
    exponents.push(exponent("density_phase", "cell count", &scan));

    // the two-mode cell-count operator in |N, N>, the uniform phase superposition
    let op = QuadraticOperator::density(pa, pb).scaled(dv);
    let points = cfg
        .n_values
        .iter()
        .map(|&n| {
            let (m, v) = expectation_and_variance(&op, &number_state(n)?)?;
            Ok((n, m, v))
        })
        .collect::<symbreak_core::Result<Vec<_>>>()?;
    let scan = fit_scan(&points)?;
    out.csv("density_superposition.csv", &["two-mode cell-count operator in |N, N>".into()], &scan.to_csv())?;
    exponents.push(exponent("density_superposition", "cell count", &scan));

    let c = |re: f64, im: f64| C64::new(re, im);
    let factor = vec![c(0.8, 0.0), c(0.36, 0.48)];
    let h = [c(1.0, 0.0), c(0.3, -0.2), c(0.3, 0.2), c(2.0, 0.0)];
    let scan = scaling_scan(
        |n| Ok((ProductState::uniform(factor.clone(), n)?, LocalOperatorSum::uniform_single(&h, n)?)),
        &cfg.theorem_n_values,
    )?;
    out.csv("theorem_iid.csv", &["identical product state, one-mode terms".into()], &scan.to_csv())?;
    exponents.push(exponent("theorem_iid", "one-mode sum", &scan));

    let occupation = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let scan = scaling_scan(
        |n| Ok((BranchSuperposition::ghz(n)?, LocalOperatorSum::uniform_single(&occupation, n)?)),
        &cfg.theorem_n_values,
    )?;
    out.csv("theorem_two_branch.csv", &["(|0...0> + |1...1>)/sqrt 2, occupation number".into()], &scan.to_csv())?;
    exponents.push(exponent("theorem_two_branch", "occupation number", &scan));

    let family = PairCurrentFamily {
        coupling: cfg.pair_coupling,
        range: cfg.pair_range,
        theta_a: cfg.pair_theta_a,
        theta_b: cfg.pair_theta_b,
    };
    let members = bcs_pair_current_family(
        &cfg.pair_modes,
        |m| {
            let lead = BcsModel::uniform(m, cfg.half_bandwidth, cfg.gap)?;
            let p = PairProfile::new(lead.u(), lead.v())?;
            Ok((p.clone(), p))
        },
        family,
    )?;
    let points = members
        .iter()
        .map(|(m, s, o)| {
            let (mean, var) = s.mean_and_variance(o)?;
            Ok((*m, mean, var))
        })
        .collect::<symbreak_core::Result<Vec<_>>>()?;
    let scan = fit_scan(&points)?;
    out.csv(
        "pair_current.csv",
        &["pair-transfer current between two BCS product states; N = modes per side".into()],
        &scan.to_csv(),
    )?;
    exponents.push(exponent("pair_current", "pair-transfer current", &scan));

    out.json("exponents.json", &exponents)?;
    Ok(out.written)
}
