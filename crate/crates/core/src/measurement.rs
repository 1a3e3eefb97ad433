//! Sequential atom detection with exact conditional probabilities.
//!
//! Each step draws a position from the conditional one-body density of the
//! current sector state, applies `ψ(r) = φ_A(r) a + φ_B(r) b` at that
//! position, and renormalizes. Starting from `|N, N⟩` the conditional state
//! develops inter-mode coherence `⟨a†b⟩` whose argument is the emergent
//! relative phase.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::fock::{detect_at, number_state, phase_state, FockSectorState};
use crate::modes::{eval_pair, ModeModel};
use crate::numerics::{mix_seed, wrap_angle};

/// Minimum inverse-CDF grid resolution per fringe period.
pub const MIN_POINTS_PER_FRINGE: usize = 64;

/// `⟨a†a⟩`, `⟨b†b⟩`, `⟨a†b⟩` of a normalized state.
///
/// The next detection is distributed as
/// `p(r) ∝ A|φ_A|² + B|φ_B|² + 2 Re[C* φ_A φ_B*]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: C64,
}

impl DensityCoefficients {
    pub fn density(&self, phi_a: C64, phi_b: C64) -> f64 {
        self.a * phi_a.norm_sqr() + self.b * phi_b.norm_sqr() + 2.0 * (self.c.conj() * phi_a * phi_b.conj()).re
    }

    /// `2|⟨a†b⟩| / (⟨a†a⟩ + ⟨b†b⟩)`.
    pub fn visibility(&self) -> f64 {
        let n = self.a + self.b;
        if n > 0.0 {
            (2.0 * self.c.norm() / n).min(1.0)
        } else {
            0.0
        }
    }

    /// Normalized order parameter `⟨a†b⟩ / ⟨n̂⟩`.
    pub fn order_parameter(&self) -> C64 {
        let n = self.a + self.b;
        if n > 0.0 {
            self.c / n
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Relative phase `θ` with `⟨a†b⟩ ∝ e^{−iθ}`, in `[0, 2π)`; `None`
    /// when there is no coherence.
    pub fn phase(&self) -> Option<f64> {
        phase_of(self.c)
    }
}

fn phase_of(order_parameter: C64) -> Option<f64> {
    (order_parameter.norm() > 0.0).then(|| wrap_angle(-order_parameter.arg()))
}

pub fn conditional_density_coefficients(state: &FockSectorState) -> Result<DensityCoefficients> {
    if state.total_particles() == 0 {
        return Err(Error::EmptySector);
    }
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(invalid("state", "zero vector"));
    }
    let (a, b, c) = state.one_body_moments();
    Ok(DensityCoefficients { a: a / norm, b: b / norm, c: c / norm })
}

/// Node grid with cached orbital values for inverse-CDF sampling.
///
/// The density is linear between nodes. On the ring the last cell wraps
/// back to the first node.
#[derive(Clone, Debug)]
pub struct SamplingGrid {
    model: ModeModel,
    t: f64,
    nodes: Vec<f64>,
    end: f64,
    periodic: bool,
    mod_a: Vec<f64>,
    mod_b: Vec<f64>,
    cross: Vec<C64>,
}

impl SamplingGrid {
    /// Grid with at least `points_per_fringe` nodes per fringe period.
    pub fn new(model: &ModeModel, t: f64, points_per_fringe: usize) -> Result<Self> {
        if points_per_fringe < MIN_POINTS_PER_FRINGE {
            return Err(invalid("points_per_fringe", format!("{points_per_fringe} < {MIN_POINTS_PER_FRINGE}")));
        }
        let (lo, hi) = model.support(t);
        let period = model.fringe_period(t).min(hi - lo);
        let cells = (((hi - lo) / period) * points_per_fringe as f64).ceil() as usize;
        let periodic = model.is_periodic();
        let h = (hi - lo) / cells as f64;
        let count = if periodic { cells } else { cells + 1 };
        let nodes: Vec<f64> = (0..count).map(|i| lo + i as f64 * h).collect();
        let mut mod_a = Vec::with_capacity(count);
        let mut mod_b = Vec::with_capacity(count);
        let mut cross = Vec::with_capacity(count);
        for &r in &nodes {
            let (pa, pb) = eval_pair(model, r, t)?;
            mod_a.push(pa.norm_sqr());
            mod_b.push(pb.norm_sqr());
            cross.push(pa * pb.conj());
        }
        Ok(Self { model: *model, t, nodes, end: hi, periodic, mod_a, mod_b, cross })
    }

    pub fn model(&self) -> &ModeModel {
        &self.model
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.end)
    }

    /// Conditional density at every node.
    pub fn density(&self, coeffs: &DensityCoefficients) -> Vec<f64> {
        let cc = coeffs.c.conj();
        (0..self.nodes.len())
            .map(|i| (coeffs.a * self.mod_a[i] + coeffs.b * self.mod_b[i] + 2.0 * (cc * self.cross[i]).re).max(0.0))
            .collect()
    }

    fn cell_count(&self) -> usize {
        if self.periodic {
            self.nodes.len()
        } else {
            self.nodes.len() - 1
        }
    }

    fn cell(&self, i: usize, density: &[f64]) -> (f64, f64, f64, f64) {
        let x0 = self.nodes[i];
        let (x1, d1) =
            if i + 1 < self.nodes.len() { (self.nodes[i + 1], density[i + 1]) } else { (self.end, density[0]) };
        (x0, x1, density[i], d1)
    }

    /// Cumulative cell masses of a node density.
    fn cumulative(&self, density: &[f64]) -> Vec<f64> {
        let mut acc = 0.0;
        (0..self.cell_count())
            .map(|i| {
                let (x0, x1, d0, d1) = self.cell(i, density);
                acc += 0.5 * (x1 - x0) * (d0 + d1);
                acc
            })
            .collect()
    }

    /// Analytic cumulative distribution of the piecewise-linear density at `x`.
    pub fn cdf(&self, coeffs: &DensityCoefficients, x: f64) -> f64 {
        let density = self.density(coeffs);
        let cum = self.cumulative(&density);
        let total = *cum.last().unwrap();
        let mut below = 0.0;
        for (i, &upto) in cum.iter().enumerate().take(self.cell_count()) {
            let (x0, x1, d0, d1) = self.cell(i, &density);
            if x >= x1 {
                below = upto;
                continue;
            }
            if x > x0 {
                let s = x - x0;
                below += d0 * s + 0.5 * (d1 - d0) / (x1 - x0) * s * s;
            }
            break;
        }
        below / total
    }
}

/// Draws one position from the conditional density by inverse-CDF sampling
/// of its piecewise-linear interpolant.
pub fn sample_position<R: Rng + ?Sized>(coeffs: &DensityCoefficients, grid: &SamplingGrid, rng: &mut R) -> Result<f64> {
    let density = grid.density(coeffs);
    let cum = grid.cumulative(&density);
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::ZeroDensity);
    }
    let target = rng.random::<f64>() * total;
    let i = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
    let before = if i == 0 { 0.0 } else { cum[i - 1] };
    let (x0, x1, d0, d1) = grid.cell(i, &density);
    let h = x1 - x0;
    let m = (target - before).max(0.0);
    // solve d0·s + (d1 − d0)s²/(2h) = m for s in [0, h]
    let slope = (d1 - d0) / h;
    let s = if slope.abs() < 1e-14 * (d0 + d1).max(f64::MIN_POSITIVE) / h {
        if d0 > 0.0 {
            m / d0
        } else {
            0.5 * h
        }
    } else {
        let disc = (d0 * d0 + 2.0 * slope * m).max(0.0);
        2.0 * m / (d0 + disc.sqrt())
    };
    let x = x0 + s.clamp(0.0, h);
    Ok(if grid.periodic && x >= grid.end { grid.nodes[0] } else { x.min(grid.end) })
}

/// Initial condition of a detection sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// `|N, N⟩`
    Number,
    /// `|θ⟩` with the given relative phase
    Phase { theta: f64 },
}

impl InitialState {
    pub fn build(&self, n: usize) -> Result<FockSectorState> {
        match *self {
            Self::Number => number_state(n),
            Self::Phase { theta } => phase_state(n, theta),
        }
    }
}

/// One simulated photo.
///
/// `order_parameter_trajectory[j]` and `visibility_trajectory[j]` belong to
/// the conditional state after `j + 1` detections. Once every atom has been
/// detected the sector is empty and the last nonempty value is carried.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRun {
    pub seed: u64,
    pub model: ModeModel,
    pub n: usize,
    pub t: f64,
    pub initial: InitialState,
    pub positions: Vec<f64>,
    pub order_parameter_trajectory: Vec<C64>,
    pub visibility_trajectory: Vec<f64>,
    pub phase_estimate: Option<f64>,
    pub visibility: f64,
}

impl DetectionRun {
    /// CSV body with header `index,position`.
    pub fn positions_csv(&self) -> String {
        let mut out = String::from("index,position\n");
        for (i, x) in self.positions.iter().enumerate() {
            out.push_str(&format!("{i},{x:.12e}\n"));
        }
        out
    }

    /// CSV body with header `detections,order_re,order_im,visibility`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("detections,order_re,order_im,visibility\n");
        for (j, (z, v)) in self.order_parameter_trajectory.iter().zip(&self.visibility_trajectory).enumerate() {
            out.push_str(&format!("{},{:.12e},{:.12e},{:.12e}\n", j + 1, z.re, z.im, v));
        }
        out
    }
}

/// Reusable detector for one `(model, t)` setting.
#[derive(Clone, Debug)]
pub struct Detector {
    grid: SamplingGrid,
}

impl Detector {
    pub fn new(model: &ModeModel, t: f64, points_per_fringe: usize) -> Result<Self> {
        Ok(Self { grid: SamplingGrid::new(model, t, points_per_fringe)? })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn run(&self, n: usize, n_detect: usize, initial: InitialState, seed: u64) -> Result<DetectionRun> {
        if n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if n_detect > 2 * n {
            return Err(invalid("n_detect", format!("{n_detect} exceeds 2N = {}", 2 * n)));
        }
        let model = self.grid.model;
        let t = self.grid.t;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = initial.build(n)?;
        let mut coeffs = conditional_density_coefficients(&state)?;
        let mut positions = Vec::with_capacity(n_detect);
        let mut trajectory = Vec::with_capacity(n_detect);
        let mut visibilities = Vec::with_capacity(n_detect);
        for _ in 0..n_detect {
            let r = sample_position(&coeffs, &self.grid, &mut rng)?;
            let (pa, pb) = eval_pair(&model, r, t)?;
            state = detect_at(pa, pb, &state)?.normalized();
            positions.push(r);
            if state.total_particles() > 0 {
                coeffs = conditional_density_coefficients(&state)?;
            }
            trajectory.push(coeffs.order_parameter());
            visibilities.push(coeffs.visibility());
        }
        let (phase_estimate, visibility) = if n_detect == 0 {
            (coeffs.phase(), coeffs.visibility())
        } else {
            (phase_of(*trajectory.last().unwrap()), *visibilities.last().unwrap())
        };
        Ok(DetectionRun {
            seed,
            model,
            n,
            t,
            initial,
            positions,
            order_parameter_trajectory: trajectory,
            visibility_trajectory: visibilities,
            phase_estimate,
            visibility,
        })
    }
}

/// Detects `n_detect` of the `2N` atoms of `|N, N⟩`.
pub fn run_detection(n: usize, n_detect: usize, model: &ModeModel, t: f64, seed: u64) -> Result<DetectionRun> {
    Detector::new(model, t, MIN_POINTS_PER_FRINGE)?.run(n, n_detect, InitialState::Number, seed)
}

/// Maximum-likelihood relative phase of a set of detected positions,
/// maximizing `Σ_m ln |Ψ_θ(r_m)|²` over `θ`.
pub fn ml_phase_fit(model: &ModeModel, t: f64, positions: &[f64]) -> Result<f64> {
    if positions.is_empty() {
        return Err(invalid("positions", "no detections to fit"));
    }
    let terms: Vec<(f64, C64)> = positions
        .iter()
        .map(|&r| eval_pair(model, r, t).map(|(a, b)| (a.norm_sqr() + b.norm_sqr(), b.conj() * a)))
        .collect::<Result<_>>()?;
    let log_likelihood = |theta: f64| -> f64 {
        let e = C64::from_polar(1.0, theta);
        terms.iter().map(|&(s, chi)| (s + 2.0 * (chi * e).re).max(1e-300).ln()).sum()
    };
    const COARSE: usize = 720;
    let step = TAU / COARSE as f64;
    let best = (0..COARSE)
        .map(|j| j as f64 * step)
        .map(|th| (th, log_likelihood(th)))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    // golden-section refinement inside the bracketing coarse cells
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (log_likelihood(x1), log_likelihood(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = log_likelihood(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = log_likelihood(x1);
        }
    }
    Ok(wrap_angle(0.5 * (lo + hi)))
}

/// Aggregate of many independent photos.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub master_seed: u64,
    pub n: usize,
    pub n_detect: usize,
    pub t: f64,
    pub model: ModeModel,
    pub run_count: usize,
    pub run_seeds: Vec<u64>,
    /// Counts of final phase estimates in equal bins over `[0, 2π)`.
    pub phase_histogram: Vec<u64>,
    /// Runs whose conditional state carried no coherence.
    pub phase_undetermined: u64,
    pub phases: Vec<Option<f64>>,
    pub visibilities: Vec<f64>,
    pub position_bin_edges: Vec<f64>,
    /// Detected atoms per unit length, averaged over runs.
    pub mean_density: Vec<f64>,
    /// Standard error of `mean_density` from run-to-run scatter.
    pub density_stderr: Vec<f64>,
}

impl EnsembleReport {
    pub fn phase_bin_centers(&self) -> Vec<f64> {
        let w = TAU / self.phase_histogram.len() as f64;
        (0..self.phase_histogram.len()).map(|i| (i as f64 + 0.5) * w).collect()
    }

    /// CSV body with header `bin_center,count`.
    pub fn phase_histogram_csv(&self) -> String {
        let mut out = String::from("bin_center,count\n");
        for (c, n) in self.phase_bin_centers().iter().zip(&self.phase_histogram) {
            out.push_str(&format!("{c:.12e},{n}\n"));
        }
        out
    }

    /// CSV body with header `bin_center,density,stderr`.
    pub fn density_csv(&self) -> String {
        let mut out = String::from("bin_center,density,stderr\n");
        for (i, (d, e)) in self.mean_density.iter().zip(&self.density_stderr).enumerate() {
            let c = 0.5 * (self.position_bin_edges[i] + self.position_bin_edges[i + 1]);
            out.push_str(&format!("{c:.12e},{d:.12e},{e:.12e}\n"));
        }
        out
    }

    /// CSV body with header `run,seed,phase,visibility`.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("run,seed,phase,visibility\n");
        for (i, ((s, p), v)) in self.run_seeds.iter().zip(&self.phases).zip(&self.visibilities).enumerate() {
            let p = p.map(|x| format!("{x:.12e}")).unwrap_or_default();
            out.push_str(&format!("{i},{s},{p},{v:.12e}\n"));
        }
        out
    }
}

/// Histogram layout of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleBins {
    pub phase_bins: usize,
    pub position_bins: usize,
}

impl Default for EnsembleBins {
    fn default() -> Self {
        Self { phase_bins: 36, position_bins: 32 }
    }
}

/// Runs `n_runs` independent photos in parallel. Run `i` is seeded with
/// `mix_seed(master_seed, i)`, and aggregation follows run order, so the
/// report does not depend on scheduling.
pub fn run_ensemble(
    n: usize,
    n_detect: usize,
    model: &ModeModel,
    t: f64,
    n_runs: usize,
    master_seed: u64,
) -> Result<EnsembleReport> {
    let detector = Detector::new(model, t, MIN_POINTS_PER_FRINGE)?;
    ensemble_with(&detector, n, n_detect, n_runs, master_seed, EnsembleBins::default())
}

pub fn ensemble_with(
    detector: &Detector,
    n: usize,
    n_detect: usize,
    n_runs: usize,
    master_seed: u64,
    bins: EnsembleBins,
) -> Result<EnsembleReport> {
    if n_runs == 0 {
        return Err(invalid("n_runs", "must be at least 1"));
    }
    if bins.phase_bins == 0 || bins.position_bins == 0 {
        return Err(invalid("bins", "histograms need at least one bin"));
    }
    let seeds: Vec<u64> = (0..n_runs as u64).map(|i| mix_seed(master_seed, i)).collect();
    let runs: Vec<DetectionRun> =
        seeds.par_iter().map(|&s| detector.run(n, n_detect, InitialState::Number, s)).collect::<Result<_>>()?;

    let mut phase_histogram = vec![0u64; bins.phase_bins];
    let mut undetermined = 0;
    for run in &runs {
        match run.phase_estimate {
            Some(p) => {
                let b = ((p / TAU) * bins.phase_bins as f64) as usize;
                phase_histogram[b.min(bins.phase_bins - 1)] += 1;
            }
            None => undetermined += 1,
        }
    }

    let (lo, hi) = detector.grid.bounds();
    let width = (hi - lo) / bins.position_bins as f64;
    let edges: Vec<f64> = (0..=bins.position_bins).map(|i| lo + i as f64 * width).collect();
    let mut sum = vec![0.0; bins.position_bins];
    let mut sum_sq = vec![0.0; bins.position_bins];
    for run in &runs {
        let mut counts = vec![0.0; bins.position_bins];
        for &x in &run.positions {
            let b = (((x - lo) / width) as usize).min(bins.position_bins - 1);
            counts[b] += 1.0;
        }
        for (i, c) in counts.into_iter().enumerate() {
            sum[i] += c;
            sum_sq[i] += c * c;
        }
    }
    let runs_f = n_runs as f64;
    let mean_density: Vec<f64> = sum.iter().map(|s| s / runs_f / width).collect();
    let density_stderr: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, q)| {
            let mean = s / runs_f;
            let var = if n_runs > 1 { ((q - runs_f * mean * mean) / (runs_f - 1.0)).max(0.0) } else { 0.0 };
            (var / runs_f).sqrt() / width
        })
        .collect();

    Ok(EnsembleReport {
        master_seed,
        n,
        n_detect,
        t: detector.grid.t,
        model: detector.grid.model,
        run_count: n_runs,
        run_seeds: seeds,
        phase_histogram,
        phase_undetermined: undetermined,
        phases: runs.iter().map(|r| r.phase_estimate).collect(),
        visibilities: runs.iter().map(|r| r.visibility).collect(),
        position_bin_edges: edges,
        mean_density,
        density_stderr,
    })
}
