//! Zero-temperature BCS numerics for two tunnel-coupled superconductors.
//!
//! A BCS state with phase `θ` is `Π_k (u_k + v_k e^{iθ} P_k†)|0⟩`, so two
//! states of the same model overlap as `Π_k (u_k² + v_k² e^{−i(θ−θ′)})`,
//! which vanishes exponentially in the number of modes. The critical
//! current is evaluated at second order in a constant tunneling element.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};
use crate::numerics::{angle_diff, gauss_legendre, linear_fit, pairwise_sum, pairwise_sum_by, wrap_angle};

/// Single-particle energies, gap, and the derived coherence factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcsModel {
    xi: Vec<f64>,
    gap: f64,
    /// Modes per unit energy.
    dos: f64,
    half_bandwidth: f64,
    u2: Vec<f64>,
    v2: Vec<f64>,
    energy: Vec<f64>,
}

impl BcsModel {
    /// `m` modes on the midpoint grid of `[−W, W]`.
    pub fn uniform(m: usize, half_bandwidth: f64, gap: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("M", "need at least one mode"));
        }
        if !(half_bandwidth > 0.0) {
            return Err(invalid("W", "half bandwidth must be positive"));
        }
        let h = 2.0 * half_bandwidth / m as f64;
        let xi = (0..m).map(|j| -half_bandwidth + (j as f64 + 0.5) * h).collect();
        Self::from_xi(xi, gap, m as f64 / (2.0 * half_bandwidth), half_bandwidth)
    }

    /// Arbitrary energy list with an explicit density of states.
    pub fn from_xi(xi: Vec<f64>, gap: f64, dos: f64, half_bandwidth: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(invalid("gap", "must be positive"));
        }
        if xi.is_empty() {
            return Err(invalid("xi", "need at least one mode"));
        }
        let mut u2 = Vec::with_capacity(xi.len());
        let mut v2 = Vec::with_capacity(xi.len());
        let mut energy = Vec::with_capacity(xi.len());
        for &x in &xi {
            let e = x.hypot(gap);
            // the smaller factor is formed without cancellation
            let small = gap * gap / (2.0 * e * (e + x.abs()));
            let (u, v) = if x >= 0.0 { (1.0 - small, small) } else { (small, 1.0 - small) };
            u2.push(u);
            v2.push(v);
            energy.push(e);
        }
        Ok(Self { xi, gap, dos, half_bandwidth, u2, v2, energy })
    }

    /// The same spectrum repeated `times` times, as for a volume `times`
    /// larger.
    pub fn replicated(&self, times: usize) -> Self {
        let rep = |v: &Vec<f64>| v.iter().copied().cycle().take(v.len() * times).collect::<Vec<_>>();
        Self {
            xi: rep(&self.xi),
            gap: self.gap,
            dos: self.dos * times as f64,
            half_bandwidth: self.half_bandwidth,
            u2: rep(&self.u2),
            v2: rep(&self.v2),
            energy: rep(&self.energy),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.xi.len()
    }
    pub fn gap(&self) -> f64 {
        self.gap
    }
    pub fn dos(&self) -> f64 {
        self.dos
    }
    pub fn half_bandwidth(&self) -> f64 {
        self.half_bandwidth
    }
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn u(&self) -> Vec<f64> {
        self.u2.iter().map(|x| x.sqrt()).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.v2.iter().map(|x| x.sqrt()).collect()
    }

    fn factor(&self, k: usize, phase: C64) -> C64 {
        self.u2[k] + self.v2[k] * phase
    }

    /// `−(1/M) Σ_k ln|u_k² + v_k² e^{−iδθ}|`: the decay rate per mode.
    pub fn decay_rate(&self, dtheta: f64) -> f64 {
        let phase = C64::from_polar(1.0, -dtheta);
        let logs: Vec<f64> = (0..self.mode_count()).map(|k| self.factor(k, phase).norm().ln()).collect();
        -pairwise_sum(&logs) / self.mode_count() as f64
    }
}

/// `Σ_k ln(u_k² + v_k² e^{−iδθ})`, principal branch per factor.
pub fn ln_bcs_overlap(model: &BcsModel, dtheta: f64) -> C64 {
    let phase = C64::from_polar(1.0, -dtheta);
    let logs: Vec<C64> = (0..model.mode_count()).map(|k| model.factor(k, phase).ln()).collect();
    let re: Vec<f64> = logs.iter().map(|z| z.re).collect();
    let im: Vec<f64> = logs.iter().map(|z| z.im).collect();
    C64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// `⟨θ|θ′⟩` for `δθ = θ − θ′`, via the log-sum.
pub fn bcs_overlap(model: &BcsModel, dtheta: f64) -> C64 {
    ln_bcs_overlap(model, dtheta).exp()
}

/// `Π_k (u_k² + v_k² e^{−iδθ})` multiplied out directly.
pub fn bcs_overlap_direct(model: &BcsModel, dtheta: f64) -> C64 {
    let phase = C64::from_polar(1.0, -dtheta);
    (0..model.mode_count()).fold(C64::new(1.0, 0.0), |acc, k| acc * model.factor(k, phase))
}

/// One row of an overlap-decay scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub modes: usize,
    pub magnitude: f64,
    pub ln_magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayScan {
    pub dtheta: f64,
    pub rows: Vec<DecayRow>,
    /// `−d ln|overlap| / dM` from a least-squares fit.
    pub fitted_rate: Option<f64>,
    /// Per-mode average of the base spectrum.
    pub analytic_rate: f64,
}

impl DecayScan {
    /// CSV body with header `M,abs_overlap,ln_abs_overlap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,abs_overlap,ln_abs_overlap\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.12e},{:.12e}\n", r.modes, r.magnitude, r.ln_magnitude));
        }
        out
    }
}

/// `|⟨θ|θ′⟩|` for the base spectrum replicated `r` times, for each `r`.
pub fn overlap_decay_scan(base: &BcsModel, replicas: &[usize], dtheta: f64) -> Result<DecayScan> {
    let d = wrap_angle(dtheta);
    if d == 0.0 {
        return Err(invalid("dtheta", "no decay at δθ = 0 (mod 2π)"));
    }
    if replicas.contains(&0) {
        return Err(invalid("replicas", "replication factors must be positive"));
    }
    let rows: Vec<DecayRow> = replicas
        .iter()
        .map(|&r| {
            let model = base.replicated(r);
            let ln = ln_bcs_overlap(&model, d).re;
            DecayRow { modes: model.mode_count(), magnitude: ln.exp(), ln_magnitude: ln }
        })
        .collect();
    let fitted_rate = (rows.len() >= 2).then(|| {
        let x: Vec<f64> = rows.iter().map(|r| r.modes as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.ln_magnitude).collect();
        -linear_fit(&x, &y).0
    });
    Ok(DecayScan { dtheta: d, rows, fitted_rate, analytic_rate: base.decay_rate(d) })
}

/// Two BCS leads joined by a constant tunneling element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JunctionModel {
    pub side_a: BcsModel,
    pub side_b: BcsModel,
    /// `|T|²`
    pub tunneling_sq: f64,
    pub charge: f64,
    pub hbar: f64,
}

impl JunctionModel {
    /// Symmetric junction in units `e = ħ = 1`.
    pub fn symmetric(model: BcsModel, tunneling_sq: f64) -> Result<Self> {
        Self::new(model.clone(), model, tunneling_sq, 1.0, 1.0)
    }

    pub fn new(side_a: BcsModel, side_b: BcsModel, tunneling_sq: f64, charge: f64, hbar: f64) -> Result<Self> {
        if !(tunneling_sq >= 0.0) {
            return Err(invalid("|T|^2", "must be non-negative"));
        }
        if !(charge > 0.0 && hbar > 0.0) {
            return Err(invalid("units", "e and ħ must be positive"));
        }
        Ok(Self { side_a, side_b, tunneling_sq, charge, hbar })
    }

    /// `R_N` from `1/R_N = (4πe²/ħ)|T|² N0_A N0_B`.
    pub fn normal_resistance(&self) -> f64 {
        let g =
            4.0 * PI * self.charge * self.charge / self.hbar * self.tunneling_sq * self.side_a.dos * self.side_b.dos;
        1.0 / g
    }

    /// `πΔ/(2eR_N)`, defined for equal gaps.
    pub fn ambegaokar_baratoff(&self) -> Option<f64> {
        let (da, db) = (self.side_a.gap, self.side_b.gap);
        ((da - db).abs() <= 1e-12 * da).then(|| PI * da / (2.0 * self.charge * self.normal_resistance()))
    }

    fn prefactor(&self) -> f64 {
        // (e/ħ) per spin direction, two spins
        2.0 * self.charge / self.hbar * self.tunneling_sq
    }

    fn check_bandwidth(&self) -> Result<()> {
        for (side, m) in [("A", &self.side_a), ("B", &self.side_b)] {
            if m.half_bandwidth < 10.0 * m.gap {
                return Err(invalid("W", format!("side {side}: W = {} < 10Δ = {}", m.half_bandwidth, 10.0 * m.gap)));
            }
        }
        Ok(())
    }
}

/// `J_S = (2e/ħ)|T|² Σ_{k,k′} Δ_A Δ_B / (E_k E_{k′} (E_k + E_{k′}))`.
///
/// Rows run in parallel; each row and the row totals are summed pairwise in
/// index order, so the result is independent of the thread count.
pub fn ab_critical_current(junction: &JunctionModel) -> Result<f64> {
    junction.check_bandwidth()?;
    if junction.tunneling_sq == 0.0 {
        return Ok(0.0);
    }
    let da_db = junction.side_a.gap * junction.side_b.gap;
    let ea = &junction.side_a.energy;
    let eb = &junction.side_b.energy;
    let rows: Vec<f64> =
        ea.par_iter().map(|&e| pairwise_sum_by(0, eb.len(), &|j| da_db / (e * eb[j] * (e + eb[j])))).collect();
    Ok(junction.prefactor() * pairwise_sum(&rows))
}

/// Band-limited continuum value of the same double sum,
/// `(2e/ħ)|T|² N0_A N0_B ∫∫ Δ_A Δ_B / (E E′ (E + E′)) dξ dξ′`, by composite
/// Gauss–Legendre quadrature in `u = asinh(ξ/Δ)` (where `dξ/E = du`).
pub fn continuum_critical_current(junction: &JunctionModel) -> f64 {
    const PANELS: usize = 64;
    const ORDER: usize = 16;
    let (x, w) = gauss_legendre(ORDER);
    let nodes = |m: &BcsModel| -> Vec<(f64, f64)> {
        let top = (m.half_bandwidth / m.gap).asinh();
        let h = 2.0 * top / PANELS as f64;
        (0..PANELS)
            .flat_map(|p| {
                let mid = -top + (p as f64 + 0.5) * h;
                x.iter().zip(&w).map(move |(xi, wi)| (mid + 0.5 * h * xi, 0.5 * h * wi)).collect::<Vec<_>>()
            })
            .collect()
    };
    let (da, db) = (junction.side_a.gap, junction.side_b.gap);
    let na = nodes(&junction.side_a);
    let nb = nodes(&junction.side_b);
    let rows: Vec<f64> = na
        .iter()
        .map(|&(ua, wa)| {
            let ca = da * ua.cosh();
            wa * pairwise_sum_by(0, nb.len(), &|j| nb[j].1 * da * db / (ca + db * nb[j].0.cosh()))
        })
        .collect();
    junction.prefactor() * junction.side_a.dos * junction.side_b.dos * pairwise_sum(&rows)
}

/// `J_θ = J_S sin θ`.
pub fn josephson_current(j_s: f64, theta: f64) -> f64 {
    j_s * theta.sin()
}

/// Default angular resolution for deduplication and projection tolerance.
pub const DEFAULT_RESOLUTION: f64 = TAU / 360.0;

/// One `(θ_A, θ_B)` component of a two-lead superposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub theta_a: f64,
    pub theta_b: f64,
    pub weight: C64,
}

impl Sector {
    pub fn relative_phase(&self) -> f64 {
        wrap_angle(self.theta_a - self.theta_b)
    }

    /// `θ̄ = (θ_A + θ_B)/2` with `θ_A` taken as `θ_B + (θ_A − θ_B mod 2π)`.
    pub fn mean_phase(&self) -> f64 {
        wrap_angle(self.theta_b + self.relative_phase() / 2.0)
    }
}

/// `|Ξ⟩ = Σ c_{θ_A θ_B} |θ_A⟩|θ_B⟩` over a finite set of phase sectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSuperposition {
    sectors: Vec<Sector>,
    resolution: f64,
}

impl SectorSuperposition {
    /// Sectors closer than `resolution` in both angles are merged, summing
    /// their weights.
    pub fn new(sectors: Vec<Sector>, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(invalid("resolution", "must be positive"));
        }
        let mut merged: Vec<Sector> = Vec::with_capacity(sectors.len());
        for s in sectors {
            let s = Sector { theta_a: wrap_angle(s.theta_a), theta_b: wrap_angle(s.theta_b), weight: s.weight };
            match merged.iter_mut().find(|m| {
                angle_diff(m.theta_a, s.theta_a).abs() < resolution
                    && angle_diff(m.theta_b, s.theta_b).abs() < resolution
            }) {
                Some(m) => m.weight += s.weight,
                None => merged.push(s),
            }
        }
        if merged.iter().all(|s| s.weight == C64::new(0.0, 0.0)) {
            return Err(invalid("weights", "all sector weights vanish"));
        }
        Ok(Self { sectors: merged, resolution })
    }

    /// Equal weights on an `n × n` grid of `(θ_A, θ_B)`: the U(1)-symmetric
    /// state of two independently prepared leads.
    pub fn uniform_grid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "grid needs at least one point"));
        }
        let w = C64::new(1.0 / n as f64, 0.0);
        let step = TAU / n as f64;
        let sectors = (0..n)
            .flat_map(|i| (0..n).map(move |j| Sector { theta_a: i as f64 * step, theta_b: j as f64 * step, weight: w }))
            .collect();
        Self::new(sectors, DEFAULT_RESOLUTION.min(step / 2.0))
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// `Σ |c|²`, the norm in the orthogonal-sector limit.
    pub fn diagonal_norm(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight.norm_sqr()).sum()
    }

    /// `⟨Ξ|Ξ⟩` with the finite-size overlap kernel of the two leads.
    pub fn kernel_norm(&self, lead_a: &BcsModel, lead_b: &BcsModel) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for s in &self.sectors {
            for t in &self.sectors {
                let k = bcs_overlap(lead_a, s.theta_a - t.theta_a) * bcs_overlap(lead_b, s.theta_b - t.theta_b);
                acc += s.weight.conj() * t.weight * k;
            }
        }
        acc.re
    }

    /// `⟨J⟩ = Σ |c|² J_S sin(θ_A − θ_B) / Σ |c|²`.
    pub fn expected_current(&self, j_s: f64) -> f64 {
        let num: f64 =
            self.sectors.iter().map(|s| s.weight.norm_sqr() * josephson_current(j_s, s.relative_phase())).sum();
        num / self.diagonal_norm()
    }
}

/// Keeps the sectors whose relative phase lies within `tol` of the measured
/// value and renormalizes in the orthogonal-sector limit.
pub fn sector_project(state: &SectorSuperposition, measured_theta: f64, tol: f64) -> Result<SectorSuperposition> {
    if !(tol >= 0.0) {
        return Err(invalid("tol", "must be non-negative"));
    }
    let slack = 1e-12;
    let kept: Vec<Sector> = state
        .sectors
        .iter()
        .filter(|s| angle_diff(s.relative_phase(), measured_theta).abs() <= tol + slack)
        .copied()
        .collect();
    let norm: f64 = kept.iter().map(|s| s.weight.norm_sqr()).sum();
    if kept.is_empty() || norm == 0.0 {
        return Err(Error::EmptyProjection { theta: measured_theta });
    }
    let scale = 1.0 / norm.sqrt();
    let sectors = kept.into_iter().map(|s| Sector { weight: s.weight * scale, ..s }).collect();
    Ok(SectorSuperposition { sectors, resolution: state.resolution })
}

/// One relative-phase bin of the current-measurement statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBin {
    pub theta: f64,
    pub probability: f64,
    pub current: f64,
}

/// Probability of each current outcome `J_S sin θ`, binned on the relative
/// phase with bin `i` centered at `2πi/bins`.
pub fn measurement_outcome_distribution(state: &SectorSuperposition, j_s: f64, bins: usize) -> Result<Vec<OutcomeBin>> {
    if bins == 0 {
        return Err(invalid("bins", "need at least one bin"));
    }
    let width = TAU / bins as f64;
    let mut prob = vec![0.0; bins];
    for s in &state.sectors {
        let b = (wrap_angle(s.relative_phase() + width / 2.0) / width) as usize;
        prob[b.min(bins - 1)] += s.weight.norm_sqr();
    }
    let total = state.diagonal_norm();
    Ok(prob
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let theta = i as f64 * width;
            OutcomeBin { theta, probability: p / total, current: josephson_current(j_s, theta) }
        })
        .collect())
}
