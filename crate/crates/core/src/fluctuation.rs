//! Mean and variance of sums of few-mode operators.
//!
//! In a product state two terms with disjoint supports are uncorrelated, so
//! the variance of `O = Σ_a T_a` only collects covariances of overlapping
//! pairs and grows linearly with the number of modes. Superpositions of
//! macroscopically distinct product states escape this bound; those are
//! evaluated exactly by [`BranchSuperposition`].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::numerics::linear_fit;

/// Largest local dimension accepted per mode.
pub const MAX_LOCAL_DIM: usize = 8;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

/// Tensor product of normalized single-mode vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    factors: Vec<Vec<C64>>,
}

impl ProductState {
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if f.is_empty() || f.len() > MAX_LOCAL_DIM {
                return Err(invalid("factor", format!("mode {i} has dimension {}", f.len())));
            }
            let norm: f64 = f.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(invalid("factor", format!("mode {i} has squared norm {norm}")));
            }
        }
        Ok(Self { factors })
    }

    /// `n` copies of the same factor.
    pub fn uniform(factor: Vec<C64>, n: usize) -> Result<Self> {
        Self::new(vec![factor; n])
    }

    pub fn mode_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &[C64] {
        &self.factors[i]
    }

    fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }
}

/// Modes a term acts on, in the order its matrix is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    One(usize),
    Two(usize, usize),
}

impl Support {
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Self::One(i) => vec![i],
            Self::Two(i, j) => vec![i, j],
        }
    }
}

/// A Hermitian matrix on one or two modes. Two-mode matrices are row-major
/// in the basis `|p q⟩ → p·d_j + q` for support `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub support: Support,
    pub dim: usize,
    pub matrix: Vec<C64>,
}

impl Term {
    pub fn new(support: Support, matrix: Vec<C64>) -> Result<Self> {
        let dim = (matrix.len() as f64).sqrt().round() as usize;
        if dim * dim != matrix.len() || dim == 0 {
            return Err(invalid("matrix", format!("{} entries is not a square", matrix.len())));
        }
        if let Support::Two(i, j) = support {
            if i == j {
                return Err(invalid("support", "two-mode term needs distinct modes"));
            }
        }
        let mut deviation: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                deviation = deviation.max((matrix[r * dim + c] - matrix[c * dim + r].conj()).norm());
            }
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { support, dim, matrix })
    }

    /// Single-mode term from a real diagonal.
    pub fn diagonal(mode: usize, diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for (i, &x) in diag.iter().enumerate() {
            m[i * d + i] = C64::new(x, 0.0);
        }
        Self::new(Support::One(mode), m)
    }
}

/// `O = Σ_a T_a` with one- and two-mode Hermitian terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalOperatorSum {
    pub terms: Vec<Term>,
}

impl LocalOperatorSum {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    /// Same single-mode matrix on every mode `0..n`.
    pub fn uniform_single(matrix: &[C64], n: usize) -> Result<Self> {
        (0..n).map(|i| Term::new(Support::One(i), matrix.to_vec())).collect::<Result<Vec<_>>>().map(Self::new)
    }

    fn check_against(&self, dims: &[usize]) -> Result<()> {
        for t in &self.terms {
            let modes = t.support.modes();
            if let Some(&bad) = modes.iter().find(|&&m| m >= dims.len()) {
                return Err(invalid("support", format!("mode {bad} out of range 0..{}", dims.len())));
            }
            let want: usize = modes.iter().map(|&m| dims[m]).product();
            if want != t.dim {
                return Err(Error::LengthMismatch { what: "term dimension vs support", left: t.dim, right: want });
            }
        }
        Ok(())
    }
}

/// Tensor product of single-mode factors, first factor most significant.
fn local_vector(factors: &[&[C64]]) -> Vec<C64> {
    let mut v = vec![C64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(v.len() * f.len());
        for a in &v {
            for b in f.iter() {
                next.push(a * b);
            }
        }
        v = next;
    }
    v
}

/// Applies `term` to a vector living on the ordered modes `union`.
fn apply_embedded(term: &Term, union: &[usize], dims: &[usize], v: &[C64]) -> Vec<C64> {
    let udims: Vec<usize> = union.iter().map(|&m| dims[m]).collect();
    let strides: Vec<usize> = {
        let mut s = vec![1; udims.len()];
        for i in (0..udims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * udims[i + 1];
        }
        s
    };
    let pos: Vec<usize> = term.support.modes().iter().map(|m| union.iter().position(|u| u == m).unwrap()).collect();
    let (local_dims, local_strides): (Vec<usize>, Vec<usize>) = pos.iter().map(|&p| (udims[p], strides[p])).unzip();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        // local row index and the base index with the support digits zeroed
        let mut row = 0;
        let mut base = idx;
        for (&d, &s) in local_dims.iter().zip(&local_strides) {
            let digit = (idx / s) % d;
            row = row * d + digit;
            base -= digit * s;
        }
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..term.dim {
            let m = term.matrix[row * term.dim + col];
            if m == C64::new(0.0, 0.0) {
                continue;
            }
            let mut src = base;
            let mut rem = col;
            for k in (0..local_dims.len()).rev() {
                src += (rem % local_dims[k]) * local_strides[k];
                rem /= local_dims[k];
            }
            acc += m * v[src];
        }
        *o = acc;
    }
    out
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Local matrix elements between product states `x` and `y`, restricted to
/// the modes a term (or pair of terms) touches.
struct Contraction<'a> {
    x: &'a ProductState,
    y: &'a ProductState,
    dims: Vec<usize>,
}

impl<'a> Contraction<'a> {
    fn vectors(&self, union: &[usize]) -> (Vec<C64>, Vec<C64>) {
        let xf: Vec<&[C64]> = union.iter().map(|&m| self.x.factor(m)).collect();
        let yf: Vec<&[C64]> = union.iter().map(|&m| self.y.factor(m)).collect();
        (local_vector(&xf), local_vector(&yf))
    }

    fn single(&self, t: &Term) -> C64 {
        let union = t.support.modes();
        let (xv, yv) = self.vectors(&union);
        dot(&xv, &apply_embedded(t, &union, &self.dims, &yv))
    }

    fn pair(&self, a: &Term, b: &Term, union: &[usize]) -> C64 {
        let (xv, yv) = self.vectors(union);
        let bt = apply_embedded(b, union, &self.dims, &yv);
        let abt = apply_embedded(a, union, &self.dims, &bt);
        dot(&xv, &abt)
    }
}

fn union_of(a: &Term, b: &Term) -> Vec<usize> {
    let set: BTreeSet<usize> = a.support.modes().into_iter().chain(b.support.modes()).collect();
    set.into_iter().collect()
}

fn overlaps(a: &Term, b: &Term) -> bool {
    let bm = b.support.modes();
    a.support.modes().iter().any(|m| bm.contains(m))
}

/// Exact `(⟨O⟩, Var O)` in a product state.
pub fn mean_and_variance(op: &LocalOperatorSum, s: &ProductState) -> Result<(f64, f64)> {
    let dims = s.dims();
    op.check_against(&dims)?;
    let ctx = Contraction { x: s, y: s, dims };
    let means: Vec<f64> = op.terms.iter().map(|t| ctx.single(t).re).collect();
    let mean = means.iter().sum();

    let mut by_mode: Vec<Vec<usize>> = vec![Vec::new(); s.mode_count()];
    for (a, t) in op.terms.iter().enumerate() {
        for m in t.support.modes() {
            by_mode[m].push(a);
        }
    }
    let mut variance = 0.0;
    for (a, ta) in op.terms.iter().enumerate() {
        let partners: BTreeSet<usize> =
            ta.support.modes().iter().flat_map(|&m| by_mode[m].iter().copied()).filter(|&b| b >= a).collect();
        for b in partners {
            let tb = &op.terms[b];
            let union = union_of(ta, tb);
            let cov = ctx.pair(ta, tb, &union).re - means[a] * means[b];
            variance += if a == b { cov } else { 2.0 * cov };
        }
    }
    Ok((mean, variance))
}

/// States whose moments of a local operator sum can be evaluated exactly.
pub trait Moments {
    fn mean_and_variance(&self, op: &LocalOperatorSum) -> Result<(f64, f64)>;
}

impl Moments for ProductState {
    fn mean_and_variance(&self, op: &LocalOperatorSum) -> Result<(f64, f64)> {
        mean_and_variance(op, self)
    }
}

/// `|Φ⟩ ∝ Σ_x c_x |P_x⟩` over product states `P_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSuperposition {
    pub branches: Vec<(C64, ProductState)>,
}

impl BranchSuperposition {
    pub fn new(branches: Vec<(C64, ProductState)>) -> Result<Self> {
        let Some(first) = branches.first() else {
            return Err(invalid("branches", "need at least one branch"));
        };
        let dims = first.1.dims();
        if branches.iter().any(|(_, p)| p.dims() != dims) {
            return Err(invalid("branches", "branches live on different mode layouts"));
        }
        Ok(Self { branches })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        let zero = ProductState::uniform(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], n)?;
        let one = ProductState::uniform(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], n)?;
        let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![(w, zero), (w, one)])
    }
}

/// Per-mode overlaps `⟨x_i|y_i⟩` summarized so that the product over any
/// complement of a small set can be read off in O(|set|).
struct OverlapProduct {
    per_mode: Vec<C64>,
    nonzero_product: C64,
    zeros: usize,
}

impl OverlapProduct {
    fn new(x: &ProductState, y: &ProductState) -> Self {
        let per_mode: Vec<C64> = (0..x.mode_count()).map(|i| dot(x.factor(i), y.factor(i))).collect();
        let mut nonzero_product = C64::new(1.0, 0.0);
        let mut zeros = 0;
        for o in &per_mode {
            if o.norm() == 0.0 {
                zeros += 1;
            } else {
                nonzero_product *= o;
            }
        }
        Self { per_mode, nonzero_product, zeros }
    }

    fn total(&self) -> C64 {
        if self.zeros > 0 {
            C64::new(0.0, 0.0)
        } else {
            self.nonzero_product
        }
    }

    fn excluding(&self, modes: &[usize]) -> C64 {
        let mut p = self.nonzero_product;
        let mut zeros = self.zeros;
        for &m in modes {
            let o = self.per_mode[m];
            if o.norm() == 0.0 {
                zeros -= 1;
            } else {
                p /= o;
            }
        }
        if zeros > 0 {
            C64::new(0.0, 0.0)
        } else {
            p
        }
    }
}

impl Moments for BranchSuperposition {
    fn mean_and_variance(&self, op: &LocalOperatorSum) -> Result<(f64, f64)> {
        let dims = self.branches[0].1.dims();
        op.check_against(&dims)?;
        let mut norm = C64::new(0.0, 0.0);
        let mut first = C64::new(0.0, 0.0);
        let mut second = C64::new(0.0, 0.0);
        for (cx, x) in &self.branches {
            for (cy, y) in &self.branches {
                let w = cx.conj() * cy;
                if std::ptr::eq(x, y) {
                    let (m, v) = mean_and_variance(op, x)?;
                    norm += w;
                    first += w * m;
                    second += w * (v + m * m);
                    continue;
                }
                let ov = OverlapProduct::new(x, y);
                norm += w * ov.total();
                // at most four modes can be covered by a pair of terms
                if ov.zeros > 4 {
                    continue;
                }
                let ctx = Contraction { x, y, dims: dims.clone() };
                let local_singles: Vec<C64> = op.terms.iter().map(|t| ctx.single(t)).collect();
                first += w * op
                    .terms
                    .iter()
                    .zip(&local_singles)
                    .map(|(t, l)| l * ov.excluding(&t.support.modes()))
                    .sum::<C64>();
                for (ta, la) in op.terms.iter().zip(&local_singles) {
                    for (tb, lb) in op.terms.iter().zip(&local_singles) {
                        let union = union_of(ta, tb);
                        let rest = ov.excluding(&union);
                        if rest == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let local = if overlaps(ta, tb) { ctx.pair(ta, tb, &union) } else { la * lb };
                        second += w * local * rest;
                    }
                }
            }
        }
        let norm = norm.re;
        if !(norm > 0.0) {
            return Err(invalid("branches", "superposition has zero norm"));
        }
        let mean = first.re / norm;
        Ok((mean, second.re / norm - mean * mean))
    }
}

/// One row of a fluctuation scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub relative_fluctuation: f64,
}

/// Scan rows and the fitted exponent of `ΔO/⟨O⟩ ∝ N^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// `None` when fewer than three rows have nonzero fluctuation.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

impl ScanResult {
    /// CSV body with header `N,mean,variance,relative_fluctuation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,mean,variance,relative_fluctuation\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.12e},{:.12e},{:.12e}\n", r.n, r.mean, r.variance, r.relative_fluctuation));
        }
        out
    }
}

/// Builds a scan from precomputed `(N, mean, variance)` triples.
pub fn fit_scan(points: &[(usize, f64, f64)]) -> Result<ScanResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit { usable: points.len() });
    }
    let mut rows = Vec::with_capacity(points.len());
    for &(n, mean, variance) in points {
        if mean == 0.0 {
            return Err(invalid("mean", format!("⟨O⟩ vanishes at N = {n}")));
        }
        let variance = variance.max(0.0);
        rows.push(ScanRow { n, mean, variance, relative_fluctuation: variance.sqrt() / mean.abs() });
    }
    let usable: Vec<&ScanRow> = rows.iter().filter(|r| r.relative_fluctuation > 0.0).collect();
    let (slope, intercept) = if usable.len() >= 3 {
        let x: Vec<f64> = usable.iter().map(|r| (r.n as f64).ln()).collect();
        let y: Vec<f64> = usable.iter().map(|r| r.relative_fluctuation.ln()).collect();
        let (s, c) = linear_fit(&x, &y);
        (Some(s), Some(c))
    } else {
        (None, None)
    };
    Ok(ScanResult { rows, slope, intercept })
}

/// Least-squares exponent of the relative fluctuation over a family.
pub fn scaling_scan<S, F>(family: F, n_values: &[usize]) -> Result<ScanResult>
where
    S: Moments,
    F: Fn(usize) -> Result<(S, LocalOperatorSum)>,
{
    if n_values.len() < 3 {
        return Err(Error::DegenerateFit { usable: n_values.len() });
    }
    let points = n_values
        .iter()
        .map(|&n| {
            let (state, op) = family(n)?;
            let (m, v) = state.mean_and_variance(&op)?;
            Ok((n, m, v))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_scan(&points)
}

/// BCS amplitudes `(u_k, v_k)` of one side of a junction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairProfile {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl PairProfile {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch { what: "u vs v profile", left: u.len(), right: v.len() });
        }
        if let Some(k) = u.iter().zip(&v).position(|(a, b)| (a * a + b * b - 1.0).abs() > 1e-12) {
            return Err(invalid("profile", format!("u² + v² ≠ 1 at mode {k}")));
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Schematic pair-transfer current between two BCS product states.
///
/// Each side holds `M` pair modes, each a two-level system (pair empty,
/// pair occupied) in the state `u_k|0⟩ + v_k e^{iθ_s}|1⟩`. The observable is
/// `Σ_{|k−k′| ≤ range} g · i(P_k† P_{k′} − P_{k′}† P_k)` with `P_k†` moving a
/// pair into mode `k` of side A from mode `k′` of side B; its mean is
/// `2g Σ u_k v_k u_{k′} v_{k′} sin(θ_A − θ_B)`. This stands in for the
/// microscopic current operator: it keeps the product structure and the
/// bounded two-mode terms and nothing else.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCurrentFamily {
    pub coupling: f64,
    pub range: usize,
    pub theta_a: f64,
    pub theta_b: f64,
}

impl PairCurrentFamily {
    pub fn member(&self, a: &PairProfile, b: &PairProfile) -> Result<(ProductState, LocalOperatorSum)> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { what: "side A vs side B modes", left: a.len(), right: b.len() });
        }
        let m = a.len();
        let side = |p: &PairProfile, theta: f64| -> Vec<Vec<C64>> {
            p.u.iter().zip(&p.v).map(|(&u, &v)| vec![C64::new(u, 0.0), C64::from_polar(v, theta)]).collect()
        };
        let mut factors = side(a, self.theta_a);
        factors.extend(side(b, self.theta_b));
        let state = ProductState::new(factors)?;

        let zero = C64::new(0.0, 0.0);
        let ig = C64::new(0.0, self.coupling);
        // basis |p_A p_B⟩ → 2p_A + p_B; |1 0⟩⟨0 1| carries i·g
        let mut matrix = vec![zero; 16];
        matrix[2 * 4 + 1] = ig;
        matrix[4 + 2] = -ig;
        let mut op = LocalOperatorSum::default();
        if self.coupling != 0.0 {
            for k in 0..m {
                let lo = k.saturating_sub(self.range);
                let hi = (k + self.range).min(m - 1);
                for kp in lo..=hi {
                    op.push(Term::new(Support::Two(k, m + kp), matrix.clone())?);
                }
            }
        }
        Ok((state, op))
    }
}

/// Builds the `(state, current)` family over pair-mode counts `m_values`,
/// with profiles supplied per `M`.
pub fn bcs_pair_current_family<F>(
    m_values: &[usize],
    profiles: F,
    family: PairCurrentFamily,
) -> Result<Vec<(usize, ProductState, LocalOperatorSum)>>
where
    F: Fn(usize) -> Result<(PairProfile, PairProfile)>,
{
    m_values
        .iter()
        .map(|&m| {
            let (a, b) = profiles(m)?;
            if a.len() != m {
                return Err(Error::LengthMismatch { what: "profile length vs M", left: a.len(), right: m });
            }
            let (s, o) = family.member(&a, &b)?;
            Ok((m, s, o))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pauli_z() -> Vec<C64> {
        vec![c(1.0), c(0.0), c(0.0), c(-1.0)]
    }

    #[test]
    fn eigenstates_have_zero_variance() {
        let s = ProductState::uniform(vec![c(0.0), c(1.0)], 10).unwrap();
        let (m, v) = mean_and_variance(&LocalOperatorSum::uniform_single(&pauli_z(), 10).unwrap(), &s).unwrap();
        assert_eq!((m, v), (-10.0, 0.0));
    }

    #[test]
    fn plus_states_give_binomial_variance() {
        let n = 17;
        let s = ProductState::uniform(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], n).unwrap();
        let (m, v) = mean_and_variance(&LocalOperatorSum::uniform_single(&pauli_z(), n).unwrap(), &s).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v, n as f64, epsilon = 1e-12);
    }

    #[test]
    fn disjoint_two_mode_terms_add_variances() {
        let f = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let s = ProductState::uniform(f, 6).unwrap();
        let xx: Vec<C64> = {
            let mut m = vec![c(0.0); 16];
            for i in 0..4 {
                m[i * 4 + (3 - i)] = c(1.0);
            }
            m
        };
        let terms = vec![
            Term::new(Support::Two(0, 1), xx.clone()).unwrap(),
            Term::new(Support::Two(2, 3), xx.clone()).unwrap(),
            Term::new(Support::Two(5, 4), xx).unwrap(),
        ];
        let (_, total) = mean_and_variance(&LocalOperatorSum::new(terms.clone()), &s).unwrap();
        let separate: f64 =
            terms.into_iter().map(|t| mean_and_variance(&LocalOperatorSum::new(vec![t]), &s).unwrap().1).sum();
        assert!((total - separate).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Term::new(Support::One(0), vec![c(0.0), c(1.0), c(0.0), c(0.0)]),
            Err(Error::NotHermitian { .. })
        ));
        assert!(ProductState::new(vec![vec![c(1.0), c(1.0)]]).is_err());
        let s = ProductState::uniform(vec![c(1.0), c(0.0)], 2).unwrap();
        let op = LocalOperatorSum::new(vec![Term::diagonal(3, &[1.0, 0.0]).unwrap()]);
        assert!(mean_and_variance(&op, &s).is_err());
        assert!(PairProfile::new(vec![1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn ghz_variance_is_quadratic() {
        let n = 9;
        let g = BranchSuperposition::ghz(n).unwrap();
        let (m, v) = g.mean_and_variance(&LocalOperatorSum::uniform_single(&pauli_z(), n).unwrap()).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, (n * n) as f64, epsilon = 1e-9);
    }

    #[test]
    fn single_branch_matches_product_formula() {
        let f = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let s = ProductState::uniform(f, 5).unwrap();
        let op = LocalOperatorSum::uniform_single(&pauli_z(), 5).unwrap();
        let single = BranchSuperposition::new(vec![(c(2.0), s.clone())]).unwrap();
        let (m1, v1) = single.mean_and_variance(&op).unwrap();
        let (m2, v2) = mean_and_variance(&op, &s).unwrap();
        assert_abs_diff_eq!(m1, m2, epsilon = 1e-13);
        assert_abs_diff_eq!(v1, v2, epsilon = 1e-13);
    }

    #[test]
    fn scan_excludes_zero_fluctuation_and_rejects_short_lists() {
        let family = |n: usize| {
            let s = ProductState::uniform(vec![c(1.0), c(0.0)], n)?;
            Ok((s, LocalOperatorSum::uniform_single(&pauli_z(), n)?))
        };
        let r = scaling_scan(family, &[4, 8, 16]).unwrap();
        assert!(r.rows.iter().all(|row| row.relative_fluctuation == 0.0));
        assert_eq!(r.slope, None);
        assert_eq!(scaling_scan(family, &[4, 8]).unwrap_err(), Error::DegenerateFit { usable: 2 });
    }

    fn flat_profile(m: usize) -> PairProfile {
        PairProfile::new(vec![FRAC_1_SQRT_2; m], vec![FRAC_1_SQRT_2; m]).unwrap()
    }

    #[test]
    fn pair_current_sign_and_zero_coupling() {
        let p = flat_profile(6);
        let fam = |d: f64, g: f64| PairCurrentFamily { coupling: g, range: 1, theta_a: d, theta_b: 0.0 };
        let (s, o) = fam(0.9, 1.0).member(&p, &p).unwrap();
        let (plus, _) = mean_and_variance(&o, &s).unwrap();
        let (s, o) = fam(0.9 + std::f64::consts::PI, 1.0).member(&p, &p).unwrap();
        let (minus, _) = mean_and_variance(&o, &s).unwrap();
        assert!(plus > 0.0);
        assert_abs_diff_eq!(plus, -minus, epsilon = 1e-12);
        // 6 + 2·5 couplings, each 2g·(1/2)² sin θ
        assert_abs_diff_eq!(plus, 16.0 * 0.5 * 0.9f64.sin(), epsilon = 1e-12);
        let (s, o) = fam(0.9, 0.0).member(&p, &p).unwrap();
        assert_eq!(mean_and_variance(&o, &s).unwrap(), (0.0, 0.0));
    }
}
