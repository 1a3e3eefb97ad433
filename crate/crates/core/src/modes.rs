//! Single-particle orbitals of the two released condensates and the density
//! profiles built from them. Units: `ħ = m = 1`, one spatial dimension.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};

/// Which condensate an orbital belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// Analytic description of the two condensate orbitals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ModeModel {
    /// `φ_A = e^{ikr}/√L`, `φ_B = e^{−ikr}/√L` on a ring `[0, L)`.
    PlaneWaveRing { wavenumber: f64, length: f64 },
    /// Freely expanding trap ground states released from `∓d/2`.
    GaussianExpansion { trap_frequency: f64, separation: f64 },
}

impl ModeModel {
    /// Ring model; `k` must be a multiple of `2π/L` so both orbitals are
    /// single valued.
    pub fn ring(wavenumber: f64, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(invalid("L", "ring length must be positive"));
        }
        if !(wavenumber > 0.0) {
            return Err(invalid("k", "wavenumber must be positive"));
        }
        let winding = wavenumber * length / TAU;
        if (winding - winding.round()).abs() > 1e-9 {
            return Err(invalid("k", format!("kL/2π = {winding} is not an integer")));
        }
        Ok(Self::PlaneWaveRing { wavenumber, length })
    }

    /// Ring of length `L` with `windings` phase windings per orbital; the
    /// interference pattern then has `2·windings` fringes.
    pub fn ring_with_windings(windings: u32, length: f64) -> Result<Self> {
        if windings == 0 {
            return Err(invalid("windings", "must be at least 1"));
        }
        Self::ring(TAU * windings as f64 / length, length)
    }

    /// Gaussian model; rejects trap separations for which the residual
    /// orbital overlap exceeds `1e−6`.
    pub fn gaussian(trap_frequency: f64, separation: f64) -> Result<Self> {
        if !(trap_frequency > 0.0) {
            return Err(invalid("omega", "trap frequency must be positive"));
        }
        if !(separation > 0.0) {
            return Err(invalid("d", "trap separation must be positive"));
        }
        let model = Self::GaussianExpansion { trap_frequency, separation };
        let eps = model.residual_overlap();
        if eps >= 1e-6 {
            return Err(invalid("d", format!("traps overlap: ε = {eps:e} ≥ 1e-6")));
        }
        Ok(model)
    }

    /// `|∫ φ_A* φ_B|`, conserved by free evolution. Zero on the ring.
    pub fn residual_overlap(&self) -> f64 {
        match *self {
            Self::PlaneWaveRing { .. } => 0.0,
            Self::GaussianExpansion { trap_frequency, separation } => {
                let sigma0 = 1.0 / trap_frequency.sqrt();
                (-separation * separation / (4.0 * sigma0 * sigma0)).exp()
            }
        }
    }

    /// Spacing of the interference fringes at flight time `t`.
    pub fn fringe_period(&self, t: f64) -> f64 {
        match *self {
            Self::PlaneWaveRing { wavenumber, .. } => PI / wavenumber,
            Self::GaussianExpansion { trap_frequency, separation } => {
                // exact for the chirped Gaussians: phase gradient d·τ/(σ0²(1+τ²))
                let sigma0_sq = 1.0 / trap_frequency;
                let tau = t / sigma0_sq;
                TAU * sigma0_sq * (1.0 + tau * tau) / (separation * tau.max(f64::MIN_POSITIVE))
            }
        }
    }

    /// Cloud width `σ(t) = σ₀√(1 + (t/σ₀²)²)`; infinite for the ring.
    pub fn width(&self, t: f64) -> f64 {
        match *self {
            Self::PlaneWaveRing { .. } => f64::INFINITY,
            Self::GaussianExpansion { trap_frequency, .. } => {
                let sigma0 = 1.0 / trap_frequency.sqrt();
                let tau = t / (sigma0 * sigma0);
                sigma0 * (1.0 + tau * tau).sqrt()
            }
        }
    }

    /// Interval that carries the orbitals: the ring itself, or the two
    /// clouds padded by ten widths.
    pub fn support(&self, t: f64) -> (f64, f64) {
        match *self {
            Self::PlaneWaveRing { length, .. } => (0.0, length),
            Self::GaussianExpansion { separation, .. } => {
                let half = separation / 2.0 + 10.0 * self.width(t);
                (-half, half)
            }
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::PlaneWaveRing { .. })
    }
}

/// Evaluates `φ_A(r, t)` or `φ_B(r, t)`.
pub fn eval_mode(model: &ModeModel, which: Mode, r: f64, t: f64) -> Result<C64> {
    match *model {
        ModeModel::PlaneWaveRing { wavenumber, length } => {
            if !(0.0..=length).contains(&r) {
                return Err(invalid("r", format!("{r} outside ring [0, {length}]")));
            }
            let sign = if which == Mode::A { 1.0 } else { -1.0 };
            Ok(C64::from_polar(1.0 / length.sqrt(), sign * wavenumber * r))
        }
        ModeModel::GaussianExpansion { trap_frequency, separation } => {
            let center = if which == Mode::A { -separation / 2.0 } else { separation / 2.0 };
            Ok(expanding_gaussian(1.0 / trap_frequency, r - center, t))
        }
    }
}

/// Ground state `(πσ₀²)^{−1/4} e^{−x²/2σ₀²}` evolved freely for time `t`.
fn expanding_gaussian(sigma0_sq: f64, x: f64, t: f64) -> C64 {
    let tau = t / sigma0_sq;
    let denom = C64::new(1.0, tau);
    let prefactor = (PI * sigma0_sq).powf(-0.25) / denom.sqrt();
    prefactor * (-(x * x) / (2.0 * sigma0_sq * denom)).exp()
}

/// `(φ_A, φ_B)` at one point.
pub fn eval_pair(model: &ModeModel, r: f64, t: f64) -> Result<(C64, C64)> {
    Ok((eval_mode(model, Mode::A, r, t)?, eval_mode(model, Mode::B, r, t)?))
}

/// `χ(r, t) = φ_B*(r, t) φ_A(r, t)`.
pub fn chi(model: &ModeModel, r: f64, t: f64) -> Result<C64> {
    let (a, b) = eval_pair(model, r, t)?;
    Ok(b.conj() * a)
}

/// Atoms per unit length sampled on an ordered grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityProfile {
    /// Quadrature of the profile: rectangle rule on a periodic grid (exact
    /// for trigonometric polynomials) and trapezoid rule otherwise.
    pub fn integral(&self, periodic: bool) -> f64 {
        integrate(&self.grid, &self.values, periodic)
    }

    /// `(max − min)/(max + min)` over the grid.
    pub fn visibility(&self) -> f64 {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        if max + min == 0.0 {
            0.0
        } else {
            (max - min) / (max + min)
        }
    }

    /// CSV body with header `position,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,value\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{x:.12e},{v:.12e}\n"));
        }
        out
    }
}

pub(crate) fn integrate(grid: &[f64], values: &[f64], periodic: bool) -> f64 {
    if grid.len() < 2 {
        return 0.0;
    }
    if periodic {
        let h = grid[1] - grid[0];
        values.iter().sum::<f64>() * h
    } else {
        grid.windows(2).zip(values.windows(2)).map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1])).sum()
    }
}

/// Uniform grid over the model's support; periodic (endpoint excluded) on
/// the ring.
pub fn uniform_grid(model: &ModeModel, t: f64, points: usize) -> Vec<f64> {
    let (lo, hi) = model.support(t);
    if model.is_periodic() {
        let h = (hi - lo) / points as f64;
        (0..points).map(|i| lo + i as f64 * h).collect()
    } else {
        let h = (hi - lo) / (points - 1) as f64;
        (0..points).map(|i| lo + i as f64 * h).collect()
    }
}

fn profile_with(model: &ModeModel, t: f64, grid: &[f64], f: impl Fn(C64, C64) -> f64) -> Result<DensityProfile> {
    let values = grid.iter().map(|&r| eval_pair(model, r, t).map(|(a, b)| f(a, b))).collect::<Result<Vec<_>>>()?;
    Ok(DensityProfile { grid: grid.to_vec(), values })
}

/// `N(|φ_A|² + |φ_B|²)`: the number-state density.
pub fn no_fringe_profile(model: &ModeModel, n: usize, t: f64, grid: &[f64]) -> Result<DensityProfile> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    let n = n as f64;
    profile_with(model, t, grid, |a, b| n * (a.norm_sqr() + b.norm_sqr()))
}

/// `N|φ_A e^{iθ/2} + φ_B e^{−iθ/2}|² = 2N|Ψ_θ|²`: the phase-state density.
pub fn fringe_profile(model: &ModeModel, n: usize, theta: f64, t: f64, grid: &[f64]) -> Result<DensityProfile> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    let n = n as f64;
    let (pa, pb) = (C64::from_polar(1.0, theta / 2.0), C64::from_polar(1.0, -theta / 2.0));
    profile_with(model, t, grid, |a, b| n * (a * pa + b * pb).norm_sqr())
}

/// `|Ψ_θ(r)|² = |φ_A e^{iθ/2} + φ_B e^{−iθ/2}|²/2`.
pub fn phase_orbital_density(model: &ModeModel, theta: f64, r: f64, t: f64) -> Result<f64> {
    let (a, b) = eval_pair(model, r, t)?;
    Ok((a * C64::from_polar(1.0, theta / 2.0) + b * C64::from_polar(1.0, -theta / 2.0)).norm_sqr() / 2.0)
}

/// Rejects grids that are unordered or (on the ring) leave the domain.
pub fn validate_grid(model: &ModeModel, grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::LengthMismatch { what: "grid points (need at least 2)", left: grid.len(), right: 2 });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid", "positions must be strictly increasing"));
    }
    if let ModeModel::PlaneWaveRing { length, .. } = model {
        if grid[0] < 0.0 || *grid.last().unwrap() > *length {
            return Err(invalid("grid", "positions must lie on the ring"));
        }
    }
    Ok(())
}
