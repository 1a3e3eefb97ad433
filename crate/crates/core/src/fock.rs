//! Exact linear algebra in the fixed-number two-mode bosonic sector.
//!
//! A state with `n` particles is a vector of `n + 1` complex amplitudes
//! indexed by `k`, the occupation of mode A (mode B holds `n − k`).
//! Ladder operators act on the index directly:
//!
//! * `a |k⟩ = √k |k−1⟩` and `b |k⟩ = √(n−k) |k⟩`, both landing in the
//!   `(n−1)`-particle sector;
//! * `a†b |k⟩ = √((k+1)(n−k)) |k+1⟩` and `b†a |k⟩ = √(k(n−k+1)) |k−1⟩`.
//!
//! Phase states follow the binomial expansion of
//! `((a† e^{iθ/2} + b† e^{−iθ/2}) / √2)^n |0⟩ / √(n!)`, so the amplitude on
//! `k` carries the factor `e^{i(k − n/2)θ}` and `⟨a†b⟩ = (n/2) e^{−iθ}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::numerics::ln_binomial;

/// Complex amplitude vector over occupation splits at fixed total number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockSectorState {
    total_particles: usize,
    amplitudes: Vec<C64>,
}

impl FockSectorState {
    /// Wraps an amplitude vector; its length must be `total_particles + 1`.
    pub fn new(total_particles: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != total_particles + 1 {
            return Err(Error::LengthMismatch {
                what: "amplitudes vs total_particles + 1",
                left: amplitudes.len(),
                right: total_particles + 1,
            });
        }
        Ok(Self { total_particles, amplitudes })
    }

    /// The empty sector `|0⟩`.
    pub fn vacuum() -> Self {
        Self { total_particles: 0, amplitudes: vec![C64::new(1.0, 0.0)] }
    }

    /// `|n_a, n_b⟩` for arbitrary occupations.
    pub fn fock(n_a: usize, n_b: usize) -> Self {
        let total = n_a + n_b;
        let mut amplitudes = vec![C64::new(0.0, 0.0); total + 1];
        amplitudes[n_a] = C64::new(1.0, 0.0);
        Self { total_particles: total, amplitudes }
    }

    /// All `total` particles in the orbital `(φ_A e^{iθ/2} + φ_B e^{−iθ/2})/√2`.
    pub fn phase(total: usize, theta: f64) -> Self {
        let half = total as f64 / 2.0;
        let ln_norm = -half * std::f64::consts::LN_2;
        let amplitudes = (0..=total)
            .map(|k| {
                let modulus = (ln_norm + 0.5 * ln_binomial(total, k)).exp();
                C64::from_polar(modulus, (k as f64 - half) * theta)
            })
            .collect();
        let mut state = Self { total_particles: total, amplitudes };
        state.renormalize();
        state
    }

    pub fn total_particles(&self) -> usize {
        self.total_particles
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Scales to unit norm in place; a zero vector is left untouched.
    pub fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for c in &mut self.amplitudes {
                *c *= inv;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.renormalize();
        self
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        for c in &mut self.amplitudes {
            *c *= factor;
        }
        self
    }

    /// `⟨a†a⟩`, `⟨b†b⟩` and `⟨a†b⟩`, unnormalized by the state norm.
    pub fn one_body_moments(&self) -> (f64, f64, C64) {
        let n = self.total_particles;
        let mut na = 0.0;
        let mut nb = 0.0;
        let mut ab = C64::new(0.0, 0.0);
        for (k, c) in self.amplitudes.iter().enumerate() {
            let p = c.norm_sqr();
            na += k as f64 * p;
            nb += (n - k) as f64 * p;
            if k < n {
                let elem = (((k + 1) * (n - k)) as f64).sqrt();
                ab += self.amplitudes[k + 1].conj() * c * elem;
            }
        }
        (na, nb, ab)
    }
}

/// `|N, N⟩`: exactly `n` atoms in each condensate.
pub fn number_state(n: usize) -> Result<FockSectorState> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    Ok(FockSectorState::fock(n, n))
}

/// Phase state `|θ⟩` with `2n` atoms.
pub fn phase_state(n: usize, theta: f64) -> Result<FockSectorState> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    Ok(FockSectorState::phase(2 * n, theta))
}

/// Sesquilinear inner product `⟨x|y⟩`.
pub fn inner(x: &FockSectorState, y: &FockSectorState) -> Result<C64> {
    if x.total_particles != y.total_particles {
        return Err(Error::SectorMismatch { left: x.total_particles, right: y.total_particles });
    }
    Ok(x.amplitudes.iter().zip(&y.amplitudes).map(|(a, b)| a.conj() * b).sum())
}

/// `cos^{2N}((θ − θ′)/2)`.
pub fn phase_overlap_closed_form(n: usize, theta: f64, theta_prime: f64) -> f64 {
    ((theta - theta_prime) / 2.0).cos().powi(2 * n as i32)
}

/// `(1/M) Σ_j |θ_j⟩` with `θ_j = 2πj/M`, left unnormalized.
///
/// For `M > 2N` every `k ≠ N` component is a complete root-of-unity sum and
/// vanishes, leaving `2^{−N} √C(2N, N) |N, N⟩`.
pub fn uniform_phase_sum(n: usize, m: usize) -> Result<FockSectorState> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    if m <= 2 * n {
        return Err(invalid("M", format!("need M > 2N = {}, got {m}", 2 * n)));
    }
    let dim = 2 * n + 1;
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for j in 0..m {
        let theta = TAU * j as f64 / m as f64;
        let s = FockSectorState::phase(2 * n, theta);
        for (a, c) in acc.iter_mut().zip(s.amplitudes) {
            *a += c;
        }
    }
    let inv = 1.0 / m as f64;
    for a in &mut acc {
        *a *= inv;
    }
    FockSectorState::new(2 * n, acc)
}

/// `c_aa a†a + c_ab a†b + c_ba b†a + c_bb b†b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticOperator {
    pub coefficients: [[C64; 2]; 2],
}

impl QuadraticOperator {
    pub fn new(c_aa: C64, c_ab: C64, c_ba: C64, c_bb: C64) -> Self {
        Self { coefficients: [[c_aa, c_ab], [c_ba, c_bb]] }
    }

    /// Total number operator `a†a + b†b`.
    pub fn total_number() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    /// Point density `ψ†ψ` with `ψ = φ_A a + φ_B b` evaluated at one position.
    pub fn density(phi_a: C64, phi_b: C64) -> Self {
        Self::new(
            C64::new(phi_a.norm_sqr(), 0.0),
            phi_a.conj() * phi_b,
            phi_b.conj() * phi_a,
            C64::new(phi_b.norm_sqr(), 0.0),
        )
    }

    pub fn scaled(self, factor: f64) -> Self {
        let mut c = self.coefficients;
        for row in &mut c {
            for x in row {
                *x *= factor;
            }
        }
        Self { coefficients: c }
    }

    /// Largest violation of `c = c†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let c = &self.coefficients;
        let off = (c[0][1] - c[1][0].conj()).norm();
        off.max(c[0][0].im.abs()).max(c[1][1].im.abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    fn scale(&self) -> f64 {
        self.coefficients.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Exact action of a quadratic operator on a sector state.
pub fn apply_quadratic(op: &QuadraticOperator, s: &FockSectorState) -> FockSectorState {
    let [[c_aa, c_ab], [c_ba, c_bb]] = op.coefficients;
    let n = s.total_particles;
    let amp = &s.amplitudes;
    let out = (0..=n)
        .map(|k| {
            let mut v = amp[k] * (c_aa * k as f64 + c_bb * (n - k) as f64);
            if k > 0 {
                // a†b: k−1 → k
                v += c_ab * ((k * (n - k + 1)) as f64).sqrt() * amp[k - 1];
            }
            if k < n {
                // b†a: k+1 → k
                v += c_ba * (((k + 1) * (n - k)) as f64).sqrt() * amp[k + 1];
            }
            v
        })
        .collect();
    FockSectorState { total_particles: n, amplitudes: out }
}

/// `(⟨O⟩, ⟨O²⟩ − ⟨O⟩²)` for a Hermitian quadratic `O`.
pub fn expectation_and_variance(op: &QuadraticOperator, s: &FockSectorState) -> Result<(f64, f64)> {
    let deviation = op.hermiticity_deviation();
    if deviation > 1e-12 * op.scale().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let norm = s.norm_sqr();
    if norm == 0.0 {
        return Err(invalid("state", "zero vector"));
    }
    let applied = apply_quadratic(op, s);
    let mean = inner(s, &applied)?.re / norm;
    let second = applied.norm_sqr() / norm;
    let mut var = second - mean * mean;
    if var < 0.0 && var > -1e-10 * second.max(1.0) {
        var = 0.0;
    }
    Ok((mean, var))
}

/// Applies `α a + β b`, returning the unnormalized post-detection state.
///
/// With `(α, β) = (φ_A(r), φ_B(r))` this is `ψ(r)|s⟩`, whose squared norm
/// is `⟨ρ(r)⟩`.
pub fn detect_at(alpha: C64, beta: C64, s: &FockSectorState) -> Result<FockSectorState> {
    let n = s.total_particles;
    if n == 0 {
        return Err(Error::EmptySector);
    }
    if alpha == C64::new(0.0, 0.0) && beta == C64::new(0.0, 0.0) {
        return Err(invalid("(alpha, beta)", "both zero"));
    }
    let amp = &s.amplitudes;
    let out = (0..n)
        .map(|j| {
            // a: k = j+1 → j ; b: k = j → j
            alpha * ((j + 1) as f64).sqrt() * amp[j + 1] + beta * ((n - j) as f64).sqrt() * amp[j]
        })
        .collect();
    Ok(FockSectorState { total_particles: n - 1, amplitudes: out })
}

/// Leading `O(N²)` variance of the smeared density in a phase superposition:
/// `2N²[|χ|²(1 − |m1|²) + Re{χ²(m2 − m1²)}] ΔV²`.
pub fn superposition_variance_prediction(n: usize, chi: C64, m1: C64, m2: C64, dv: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if m1.norm() > 1.0 + SLACK {
        return Err(invalid("m1", format!("|m1| = {} exceeds 1", m1.norm())));
    }
    if m2.norm() > 1.0 + SLACK {
        return Err(invalid("m2", format!("|m2| = {} exceeds 1", m2.norm())));
    }
    let n = n as f64;
    let bracket = chi.norm_sqr() * (1.0 - m1.norm_sqr()) + (chi * chi * (m2 - m1 * m1)).re;
    Ok(2.0 * n * n * bracket * dv * dv)
}

/// Variance budget of the atom count `O = ∫_ΔV ρ` in a cell of volume `ΔV`.
///
/// The two-mode truncation has no `δ(r − r′)` commutator, so the contact
/// (shot-noise) term `ΔV⟨ρ⟩` is added analytically to the exactly computed
/// normal-ordered variance `ΔV²(⟨:ρρ:⟩ − ⟨ρ⟩²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmearedDensityVariance {
    /// `⟨O⟩ = ΔV⟨ρ(r)⟩`
    pub mean: f64,
    pub normal_ordered: f64,
    pub contact: f64,
    pub total: f64,
}

/// Smeared-density statistics with midpoint evaluation of the mode functions.
pub fn smeared_density_variance(
    phi_a: C64,
    phi_b: C64,
    dv: f64,
    s: &FockSectorState,
) -> Result<SmearedDensityVariance> {
    if !(dv > 0.0) {
        return Err(invalid("dV", "must be positive"));
    }
    let norm = s.norm_sqr();
    if norm == 0.0 {
        return Err(invalid("state", "zero vector"));
    }
    let (rho, second_no) = if s.total_particles == 0 {
        (0.0, 0.0)
    } else {
        let once = detect_at(phi_a, phi_b, s)?;
        let rho = once.norm_sqr() / norm;
        let second = if once.total_particles == 0 { 0.0 } else { detect_at(phi_a, phi_b, &once)?.norm_sqr() / norm };
        (rho, second)
    };
    let mean = dv * rho;
    let normal_ordered = dv * dv * (second_no - rho * rho);
    let contact = dv * rho;
    Ok(SmearedDensityVariance { mean, normal_ordered, contact, total: normal_ordered + contact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn number_state_layout() {
        let s = number_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s = number_state(3).unwrap();
        assert_eq!(s.amplitudes().len(), 7);
        let nonzero: Vec<usize> = (0..7).filter(|&k| s.amplitudes()[k] != c(0.0, 0.0)).collect();
        assert_eq!(nonzero, vec![3]);
        assert!(number_state(0).is_err());
    }

    #[test]
    fn phase_state_n1_hand_expansion() {
        // ((a† e^{iθ/2} + b† e^{−iθ/2})/√2)² |0⟩/√2! expanded by hand
        let theta = 0.7;
        let s = phase_state(1, theta).unwrap();
        let expect = [C64::from_polar(0.5, -theta), c(FRAC_1_SQRT_2, 0.0), C64::from_polar(0.5, theta)];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e.re, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, e.im, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_state_real_at_zero_angle() {
        for n in [1, 4, 37] {
            let s = phase_state(n, 0.0).unwrap();
            assert!(s.amplitudes().iter().all(|a| a.re > 0.0 && a.im == 0.0));
        }
    }

    #[test]
    fn number_phase_overlap_reads_central_amplitude() {
        for n in [1usize, 6, 25] {
            let got = inner(&number_state(n).unwrap(), &phase_state(n, 1.3).unwrap()).unwrap();
            let expect = (ln_binomial(2 * n, n) / 2.0 - n as f64 * std::f64::consts::LN_2).exp();
            assert_abs_diff_eq!(got.re, expect, epsilon = 1e-13);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn opposite_phases_orthogonal_at_n1() {
        let z = inner(&phase_state(1, 0.0).unwrap(), &phase_state(1, PI).unwrap()).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_sector_mismatch() {
        let e = inner(&number_state(1).unwrap(), &number_state(2).unwrap()).unwrap_err();
        assert_eq!(e, Error::SectorMismatch { left: 2, right: 4 });
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(phase_overlap_closed_form(7, 0.4, 0.4), 1.0);
        let fock = inner(&phase_state(1, 0.0).unwrap(), &phase_state(1, PI / 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(fock.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(phase_overlap_closed_form(1, 0.0, PI / 2.0), 0.5, epsilon = 1e-15);
        let fock = inner(&phase_state(50, PI / 4.0).unwrap(), &phase_state(50, 0.0).unwrap()).unwrap();
        let closed = phase_overlap_closed_form(50, PI / 4.0, 0.0);
        assert!((fock.re - closed).abs() < 1e-10 * closed);
        assert!(fock.im.abs() < 1e-14);
    }

    #[test]
    fn uniform_sum_cancels_off_components() {
        let s = uniform_phase_sum(1, 4).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-16 && s.amplitudes()[2].norm() < 1e-16);
        let s = uniform_phase_sum(5, 11).unwrap();
        for (k, a) in s.amplitudes().iter().enumerate() {
            if k != 5 {
                assert!(a.norm() < 1e-12, "k={k} residual {}", a.norm());
            }
        }
        let constant = (ln_binomial(10, 5) / 2.0 - 5.0 * std::f64::consts::LN_2).exp();
        assert_abs_diff_eq!(s.amplitudes()[5].re, constant, epsilon = 1e-14);
        assert!(uniform_phase_sum(5, 10).is_err());
    }

    #[test]
    fn identity_quadratic_counts_particles() {
        let s = phase_state(4, 0.3).unwrap();
        let out = apply_quadratic(&QuadraticOperator::total_number(), &s);
        for (o, a) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert_abs_diff_eq!((o - a * 8.0).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn raising_ladder_matrix_element() {
        let n = 6usize;
        let op = QuadraticOperator::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let out = apply_quadratic(&op, &number_state(n).unwrap());
        for (k, a) in out.amplitudes().iter().enumerate() {
            let expect = if k == n + 1 { ((n * (n + 1)) as f64).sqrt() } else { 0.0 };
            assert_abs_diff_eq!(a.re, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn order_parameter_sign_convention() {
        // direct contraction Σ_k conj(c_{k+1}) c_k √((k+1)(2N−k))
        let n = 9usize;
        let theta = 1.1;
        let s = phase_state(n, theta).unwrap();
        let a = s.amplitudes();
        let mut direct = c(0.0, 0.0);
        for k in 0..2 * n {
            direct += a[k + 1].conj() * a[k] * (((k + 1) * (2 * n - k)) as f64).sqrt();
        }
        let op = QuadraticOperator::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let via_op = inner(&s, &apply_quadratic(&op, &s)).unwrap();
        let expect = C64::from_polar(n as f64, -theta);
        assert_abs_diff_eq!((direct - expect).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((via_op - expect).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((s.one_body_moments().2 - expect).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn total_number_has_zero_variance() {
        for s in [number_state(5).unwrap(), phase_state(5, 2.0).unwrap(), uniform_phase_sum(3, 9).unwrap().normalized()]
        {
            let (mean, var) = expectation_and_variance(&QuadraticOperator::total_number(), &s).unwrap();
            assert_abs_diff_eq!(mean, s.total_particles() as f64, epsilon = 1e-12);
            assert_eq!(var, 0.0);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let op = QuadraticOperator::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(expectation_and_variance(&op, &number_state(2).unwrap()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn detect_on_number_state() {
        let n = 4;
        let out = detect_at(c(1.0, 0.0), c(0.0, 0.0), &number_state(n).unwrap()).unwrap();
        assert_eq!(out.total_particles(), 2 * n - 1);
        assert_abs_diff_eq!(out.amplitudes()[n - 1].re, (n as f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.norm_sqr(), n as f64, epsilon = 1e-13);
        assert_eq!(detect_at(c(1.0, 0.0), c(0.0, 0.0), &FockSectorState::vacuum()), Err(Error::EmptySector));
    }

    #[test]
    fn detecting_own_orbital_preserves_phase_state_n2() {
        // N = 2: |θ⟩ has amplitudes 2^{-2}√C(4,k) e^{i(k−2)θ}; applying
        // (e^{−iθ/2} a + e^{iθ/2} b)/√2 gives 2·|θ⟩ in the 3-particle sector.
        let theta = 0.9;
        let s = phase_state(2, theta).unwrap();
        let alpha = C64::from_polar(FRAC_1_SQRT_2, -theta / 2.0);
        let beta = C64::from_polar(FRAC_1_SQRT_2, theta / 2.0);
        let out = detect_at(alpha, beta, &s).unwrap();
        let expect = FockSectorState::phase(3, theta).scaled(c(2.0, 0.0));
        for (a, e) in out.amplitudes().iter().zip(expect.amplitudes()) {
            assert_abs_diff_eq!((a - e).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn prediction_edge_cases() {
        let chi = C64::from_polar(0.3, 0.4);
        let theta = 1.2;
        let single = superposition_variance_prediction(
            10,
            chi,
            C64::from_polar(1.0, theta),
            C64::from_polar(1.0, 2.0 * theta),
            0.1,
        )
        .unwrap();
        assert_abs_diff_eq!(single, 0.0, epsilon = 1e-15);
        let uniform = superposition_variance_prediction(10, chi, c(0.0, 0.0), c(0.0, 0.0), 0.1).unwrap();
        assert_abs_diff_eq!(uniform, 2.0 * 100.0 * 0.09 * 0.01, epsilon = 1e-15);
        assert!(superposition_variance_prediction(10, chi, c(1.1, 0.0), c(0.0, 0.0), 0.1).is_err());
    }

    #[test]
    fn contact_term_reproduces_phase_state_shot_noise() {
        let n = 40usize;
        let theta = 0.5;
        let (phi_a, phi_b) = (C64::from_polar(0.8, 0.2), C64::from_polar(0.6, -1.0));
        let psi2 =
            (phi_a * C64::from_polar(1.0, theta / 2.0) + phi_b * C64::from_polar(1.0, -theta / 2.0)).norm_sqr() / 2.0;
        let dv = 1e-3;
        let v = smeared_density_variance(phi_a, phi_b, dv, &phase_state(n, theta).unwrap()).unwrap();
        let two_n = 2.0 * n as f64;
        assert_abs_diff_eq!(v.mean, two_n * psi2 * dv, epsilon = 1e-14);
        assert_abs_diff_eq!(v.normal_ordered, -two_n * psi2 * psi2 * dv * dv, epsilon = 1e-14);
        assert_abs_diff_eq!(v.total, two_n * psi2 * dv * (1.0 - psi2 * dv), epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn overlap_matches_closed_form(n in 1usize..=50, t1 in 0.0..TAU, t2 in 0.0..TAU) {
            let z = inner(&phase_state(n, t1).unwrap(), &phase_state(n, t2).unwrap()).unwrap();
            let closed = phase_overlap_closed_form(n, t1, t2);
            // ⟨θ|θ′⟩ is real for the symmetric e^{i(k−N)θ} convention
            prop_assert!((z.re - closed).abs() < 1e-10);
            prop_assert!(z.im.abs() < 1e-10);
        }

        #[test]
        fn hermitian_expectations_are_real(
            n in 1usize..30, theta in 0.0..TAU, d in -2.0..2.0f64, e in -2.0..2.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64,
        ) {
            let op = QuadraticOperator::new(c(d, 0.0), c(re, im), c(re, -im), c(e, 0.0));
            let s = phase_state(n, theta).unwrap();
            let z = inner(&s, &apply_quadratic(&op, &s)).unwrap();
            prop_assert!(z.im.abs() < 1e-12 * (1.0 + z.re.abs()));
            let (_, var) = expectation_and_variance(&op, &s).unwrap();
            prop_assert!(var >= 0.0);
        }
    }
}
