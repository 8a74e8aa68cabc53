//! Exact second quantization over a few orthonormal modes.
//!
//! The basis consists of occupation tuples `(n_1, …, n_m)` with `n_i ≤ n_max`
//! and `Σ n_i ≤ N_total`, ordered by total particle number so that each
//! sector `F_n` is a contiguous index range. Gauge-invariant operators are
//! stored as one dense block per sector. A sector is *closed* (represented
//! exactly) when `n ≤ n_max`; above that the per-mode cap clips it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

type Matrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Truncated bosonic Fock space over `m` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    modes: usize,
    occupation_cap: usize,
    total_cap: usize,
    basis: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    sectors: Vec<Range<usize>>,
}

/// Fock space with the default dimension cap.
pub fn build_fock(modes: usize, occupation_cap: usize, total_cap: usize) -> Result<FockSpace> {
    FockSpace::with_cap(modes, occupation_cap, total_cap, DEFAULT_DIMENSION_CAP)
}

fn count_tuples(modes: usize, cap: usize, total: usize) -> usize {
    // tuples of `modes` entries in 0..=cap summing to exactly `total`
    let mut ways = alloc::vec![0usize; total + 1];
    ways[0] = 1;
    for _ in 0..modes {
        let mut next = alloc::vec![0usize; total + 1];
        for (s, w) in ways.iter().enumerate() {
            if *w == 0 {
                continue;
            }
            for k in 0..=cap.min(total - s) {
                next[s + k] = next[s + k].saturating_add(*w);
            }
        }
        ways = next;
    }
    ways[total]
}

impl FockSpace {
    pub fn with_cap(modes: usize, occupation_cap: usize, total_cap: usize, dimension_cap: usize) -> Result<Self> {
        if !(1..=3).contains(&modes) {
            return Err(Error::config(alloc::format!("mode count must be 1, 2 or 3, got {modes}")));
        }
        let dimension = (0..=total_cap).fold(0usize, |acc, n| acc.saturating_add(count_tuples(modes, occupation_cap, n)));
        if dimension > dimension_cap {
            return Err(Error::DimensionOverflow { dimension, cap: dimension_cap });
        }
        let mut basis = Vec::with_capacity(dimension);
        let mut sectors = Vec::with_capacity(total_cap + 1);
        for n in 0..=total_cap {
            let start = basis.len();
            let mut tuple = alloc::vec![0u32; modes];
            push_tuples(&mut basis, &mut tuple, 0, n as u32, occupation_cap as u32);
            sectors.push(start..basis.len());
        }
        let index = basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Self { modes, occupation_cap, total_cap, basis, index, sectors })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn occupation_cap(&self) -> usize {
        self.occupation_cap
    }

    pub fn total_cap(&self) -> usize {
        self.total_cap
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn sector(&self, n: usize) -> Range<usize> {
        self.sectors[n].clone()
    }

    /// Sectors that the per-mode cap leaves intact.
    pub fn closed_sectors(&self) -> usize {
        self.total_cap.min(self.occupation_cap) + 1
    }

    /// Full-space matrix of `a_i`.
    pub fn annihilator(&self, mode: usize) -> Matrix {
        let d = self.dimension();
        let mut m = Matrix::zeros(d, d);
        for (col, s) in self.basis.iter().enumerate() {
            if s[mode] == 0 {
                continue;
            }
            let mut t = s.clone();
            t[mode] -= 1;
            if let Some(row) = self.index_of(&t) {
                m[(row, col)] = c((s[mode] as f64).sqrt());
            }
        }
        m
    }

    /// Full-space matrix of `a*_i` (compressed to the truncated basis).
    pub fn creator(&self, mode: usize) -> Matrix {
        self.annihilator(mode).adjoint()
    }

    /// Largest deviation of `[a_i, a*_j] - δ_ij` over basis states with
    /// headroom (every occupation below the cap and total below `N_total`).
    pub fn ccr_defect(&self) -> f64 {
        let interior: Vec<usize> = (0..self.dimension())
            .filter(|&i| {
                let s = &self.basis[i];
                s.iter().all(|&n| (n as usize) < self.occupation_cap)
                    && (s.iter().sum::<u32>() as usize) < self.total_cap
            })
            .collect();
        let mut worst = 0.0f64;
        for i in 0..self.modes {
            let a = self.annihilator(i);
            for j in 0..self.modes {
                let ad = self.creator(j);
                let comm = &a * &ad - &ad * &a;
                for &col in &interior {
                    for row in 0..self.dimension() {
                        let target = if row == col && i == j { 1.0 } else { 0.0 };
                        worst = worst.max((comm[(row, col)] - target).norm());
                    }
                }
            }
        }
        worst
    }

    /// Block of `a*(f) a(f) = Σ_ij f_i conj(f_j) a*_i a_j` on sector `n`.
    fn quadratic_block(&self, n: usize, coeffs: &[Complex64]) -> Matrix {
        let range = self.sector(n);
        let d = range.len();
        let mut m = Matrix::zeros(d, d);
        for (col, s) in self.basis[range.clone()].iter().enumerate() {
            for j in 0..self.modes {
                if s[j] == 0 || coeffs[j] == c(0.0) {
                    continue;
                }
                let mut t = s.clone();
                t[j] -= 1;
                let down = (s[j] as f64).sqrt();
                for i in 0..self.modes {
                    let mut u = t.clone();
                    u[i] += 1;
                    if let Some(row) = self.index_of(&u) {
                        let up = (u[i] as f64).sqrt();
                        m[(row - range.start, col)] += coeffs[i] * coeffs[j].conj() * (down * up);
                    }
                }
            }
        }
        m
    }

    /// Full-space matrix of `Φ(f) = a*(f) + a(f)`.
    pub fn field_operator(&self, coeffs: &[Complex64]) -> Result<Matrix> {
        self.check_coeffs(coeffs)?;
        let mut a = Matrix::zeros(self.dimension(), self.dimension());
        for (i, ci) in coeffs.iter().enumerate() {
            a += self.annihilator(i) * ci.conj();
        }
        Ok(a.adjoint() + a)
    }

    fn check_coeffs(&self, coeffs: &[Complex64]) -> Result<()> {
        if coeffs.len() != self.modes {
            return Err(Error::GridMismatch(alloc::format!(
                "{} coefficients for {} modes",
                coeffs.len(),
                self.modes
            )));
        }
        Ok(())
    }

    /// Boltzmann weights `e^{-β Σ(ε_i-μ) n_i}` of the basis states and the
    /// discarded fraction of the untruncated partition function.
    pub fn gibbs_weights(&self, energies: &[f64], beta: f64, mu: f64) -> Result<(Vec<f64>, f64)> {
        if energies.len() != self.modes {
            return Err(Error::config("one energy per mode is required"));
        }
        if energies.iter().any(|e| !(*e > mu)) {
            return Err(Error::domain("μ must lie below every mode energy"));
        }
        let weights: Vec<f64> = self
            .basis
            .iter()
            .map(|s| {
                let x: f64 = s.iter().zip(energies).map(|(&n, e)| n as f64 * (e - mu)).sum();
                (-beta * x).exp()
            })
            .collect();
        let captured: f64 = weights.iter().sum();
        let full: f64 = energies.iter().map(|e| 1.0 / (1.0 - (-beta * (e - mu)).exp())).product();
        Ok((weights, (1.0 - captured / full).max(0.0)))
    }
}

fn push_tuples(out: &mut Vec<Vec<u32>>, tuple: &mut Vec<u32>, pos: usize, remaining: u32, cap: u32) {
    if pos == tuple.len() - 1 {
        if remaining <= cap {
            tuple[pos] = remaining;
            out.push(tuple.clone());
        }
        return;
    }
    for k in (0..=remaining.min(cap)).rev() {
        tuple[pos] = k;
        push_tuples(out, tuple, pos + 1, remaining - k, cap);
    }
}

/// Gauge-invariant operator stored as one dense block per particle-number sector.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    blocks: Vec<Matrix>,
}

impl BlockOperator {
    pub fn identity(space: &FockSpace) -> Self {
        Self {
            blocks: (0..=space.total_cap)
                .map(|n| Matrix::identity(space.sector(n).len(), space.sector(n).len()))
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, n: usize) -> &Matrix {
        &self.blocks[n]
    }

    fn zip(&self, other: &Self, op: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<Self> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::GridMismatch("operators live on different Fock spaces".into()));
        }
        Ok(Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| op(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * factor).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    /// Operator norm on sector `n`.
    pub fn sector_norm(&self, n: usize) -> f64 {
        operator_norm(&self.blocks[n])
    }

    pub fn sector_norms(&self) -> Vec<f64> {
        (0..self.blocks.len()).map(|n| self.sector_norm(n)).collect()
    }

    /// Largest entry of `A - A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks.iter().map(|b| (b - b.adjoint()).camax()).fold(0.0, f64::max)
    }
}

fn operator_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn hermitian_inverse(m: Matrix) -> Result<Matrix> {
    m.cholesky()
        .map(|ch| ch.inverse())
        .ok_or_else(|| Error::domain("operator is not positive definite"))
}

/// `A(λ, f) = (λ + a*(f) a(f))^{-1}`, sector by sector.
pub fn number_resolvent_matrix(space: &FockSpace, lambda: f64, coeffs: &[Complex64]) -> Result<BlockOperator> {
    if !(lambda > 0.0) {
        return Err(Error::domain(alloc::format!("λ must be positive, got {lambda}")));
    }
    space.check_coeffs(coeffs)?;
    let mut blocks = Vec::with_capacity(space.total_cap + 1);
    for n in 0..=space.total_cap {
        let q = space.quadratic_block(n, coeffs);
        let d = q.nrows();
        blocks.push(hermitian_inverse(Matrix::identity(d, d) * c(lambda) + q)?);
    }
    Ok(BlockOperator { blocks })
}

/// Norms `‖A‖_k` for `k` in `sectors`, whether they are nondecreasing (with
/// slack `1e-12`), and the running maxima `max_{j≤k} ‖A‖_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monotonicity {
    pub sectors: Vec<usize>,
    pub norms: Vec<f64>,
    pub running_max: Vec<f64>,
    pub monotone: bool,
}

pub fn sector_norm_monotonicity(op: &BlockOperator, sectors: &[usize]) -> Monotonicity {
    let norms: Vec<f64> = sectors.iter().map(|&k| op.sector_norm(k)).collect();
    let monotone = norms.windows(2).all(|w| w[0] <= w[1] + 1e-12);
    let mut running_max = Vec::with_capacity(norms.len());
    let mut m = 0.0f64;
    for v in &norms {
        m = m.max(*v);
        running_max.push(m);
    }
    Monotonicity { sectors: sectors.to_vec(), norms, running_max, monotone }
}

/// Largest allowed discarded Gibbs weight.
pub const TRUNCATION_LIMIT: f64 = 1e-10;

/// `Tr(e^{-βH} A)/Tr e^{-βH}` for `H = Σ(ε_i-μ) N_i` on the truncated space.
pub fn gibbs_trace_expectation(space: &FockSpace, op: &BlockOperator, energies: &[f64], beta: f64, mu: f64) -> Result<f64> {
    let (weights, discarded) = space.gibbs_weights(energies, beta, mu)?;
    if discarded > TRUNCATION_LIMIT {
        return Err(Error::Truncation { weight: discarded, limit: TRUNCATION_LIMIT });
    }
    let mut num = 0.0;
    for n in 0..=space.total_cap {
        let range = space.sector(n);
        for (k, i) in range.enumerate() {
            num += weights[i] * op.block(n)[(k, k)].re;
        }
    }
    Ok(num / weights.iter().sum::<f64>())
}

/// Gibbs expectation of a full-space matrix (need not conserve particle number).
pub fn gibbs_trace_dense(space: &FockSpace, op: &Matrix, energies: &[f64], beta: f64, mu: f64) -> Result<Complex64> {
    let (weights, discarded) = space.gibbs_weights(energies, beta, mu)?;
    if discarded > TRUNCATION_LIMIT {
        return Err(Error::Truncation { weight: discarded, limit: TRUNCATION_LIMIT });
    }
    let num: Complex64 = weights.iter().enumerate().map(|(i, w)| op[(i, i)] * *w).sum();
    Ok(num / weights.iter().sum::<f64>())
}

/// Gibbs expectation of `(λ - iΦ(f))^{-1} = ∫₀^∞ e^{-uλ} e^{iuΦ(f)} du` on the
/// truncated space.
pub fn field_resolvent_oracle(space: &FockSpace, lambda: f64, coeffs: &[Complex64], energies: &[f64], beta: f64, mu: f64) -> Result<f64> {
    let phi = space.field_operator(coeffs)?;
    let d = space.dimension();
    let m = Matrix::identity(d, d) * c(lambda) - phi * Complex64::new(0.0, 1.0);
    let inv = m.try_inverse().ok_or_else(|| Error::domain("λ - iΦ is singular"))?;
    Ok(gibbs_trace_dense(space, &inv, energies, beta, mu)?.re)
}

/// Exact `‖A(λ, g1) - A(λ, g2)‖_n` for single-particle vectors `g1, g2`.
///
/// Both resolvents act only on the two-dimensional span of `g1, g2`; on `F_n`
/// the difference splits into blocks labeled by the occupation `k ≤ n` of
/// that span, each a `(k+1)`-dimensional problem on `Sym^k(ℂ²)`.
pub fn lemma33_lhs_exact(lambda: f64, g1: &[Complex64], g2: &[Complex64], n: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("λ must be positive"));
    }
    if g1.len() != g2.len() {
        return Err(Error::GridMismatch("vectors have different lengths".into()));
    }
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let n1 = dot(g1, g1).re.sqrt();
    let n2 = dot(g2, g2).re.sqrt();
    let scale = n1.max(n2);
    if scale == 0.0 {
        return Ok(0.0);
    }
    // coordinates of g1, g2 in an orthonormal basis (e1, e2) of their span
    let (u, v) = if n1 > 0.0 {
        let e1: Vec<Complex64> = g1.iter().map(|x| x / n1).collect();
        let b1 = dot(&e1, g2);
        let rest: Vec<Complex64> = g2.iter().zip(&e1).map(|(y, e)| y - e * b1).collect();
        let b2 = dot(&rest, &rest).re.sqrt();
        ([c(n1), c(0.0)], [b1, c(b2)])
    } else {
        ([c(0.0), c(0.0)], [c(n2), c(0.0)])
    };
    let dependent = u[1] == c(0.0) && v[1].norm() <= 1e-14 * scale;
    let mut worst = 0.0f64;
    for k in 0..=n {
        let value = if dependent {
            let a = 1.0 / (lambda + k as f64 * u[0].norm_sqr());
            let b = 1.0 / (lambda + k as f64 * v[0].norm_sqr());
            (a - b).abs()
        } else {
            let a = hermitian_inverse(sym_block(k, &u, lambda))?;
            let b = hermitian_inverse(sym_block(k, &v, lambda))?;
            let diff = a - b;
            diff.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()))
        };
        worst = worst.max(value);
    }
    Ok(worst)
}

/// `λ + a*(g) a(g)` on `Sym^k(ℂ²)` with basis `|j, k-j⟩`, `j = 0..=k`.
fn sym_block(k: usize, g: &[Complex64; 2], lambda: f64) -> Matrix {
    let mut m = Matrix::zeros(k + 1, k + 1);
    for j in 0..=k {
        let (p, q) = (j as f64, (k - j) as f64);
        m[(j, j)] = c(lambda + g[0].norm_sqr() * p + g[1].norm_sqr() * q);
        if j < k {
            // a*_1 a_2 |j, k-j⟩ = √((k-j)(j+1)) |j+1, k-j-1⟩
            let amp = ((q) * (p + 1.0)).sqrt();
            m[(j + 1, j)] = g[0] * g[1].conj() * amp;
            m[(j, j + 1)] = g[1] * g[0].conj() * amp;
        }
    }
    m
}
