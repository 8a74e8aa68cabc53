//! Real symmetric tridiagonal operators and their eigenpairs.
//!
//! Eigenvalues come from implicit QL (all of them) or Sturm bisection (the
//! lowest few). Eigenvectors come from inverse iteration with a pivoted
//! tridiagonal LU factorization; vectors inside a cluster of close eigenvalues
//! are reorthogonalized against each other.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::config("operator must have at least one row"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::config(alloc::format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::config("operator entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// `out = T x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().fold(1.0f64, |m, e| m.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues in ascending order (implicit QL).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iterations = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iterations += 1;
                if iterations > 60 {
                    return Err(Error::NoConvergence { index: l, iterations });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(|a, b| a.total_cmp(b));
        Ok(d)
    }

    /// The `count` smallest eigenvalues, ascending, by bisection.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.dim());
        let (glo, ghi) = self.gershgorin();
        let norm = self.norm_bound();
        let abs_tol = 1e-3 * f64::EPSILON * norm;
        let mut out = Vec::with_capacity(count);
        let mut floor = glo - f64::EPSILON * norm;
        for k in 0..count {
            // λ_k is the smallest x with count_below(x) > k
            let mut lo = floor;
            let mut hi = ghi + f64::EPSILON * norm;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if hi - lo <= (2.0 * f64::EPSILON * lo.abs().max(hi.abs())).max(abs_tol) {
                    break;
                }
                if self.count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            floor = lo;
        }
        out
    }

    /// All eigenvalues strictly below `energy`, ascending.
    pub fn eigenvalues_below(&self, energy: f64) -> Vec<f64> {
        self.lowest_eigenvalues(self.count_below(energy))
    }

    /// `‖T v - λ v‖₂`.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let mut tv = alloc::vec![0.0; self.dim()];
        self.apply(v, &mut tv);
        tv.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
    }

    /// Orthonormal eigenvectors for ascending `eigenvalues`, stored row after row.
    pub fn eigenvectors(&self, eigenvalues: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * eigenvalues.len());
        self.for_each_eigenvector(eigenvalues, |_, _, v| out.extend_from_slice(v))?;
        Ok(out)
    }

    /// Compute eigenvectors one at a time and hand each to `visit` as
    /// `(index, eigenvalue, vector)`; only the current cluster is kept in memory.
    ///
    /// Vectors are unit-norm, with the first component of magnitude above
    /// `1e-8·max|v|` made positive.
    pub fn for_each_eigenvector(
        &self,
        eigenvalues: &[f64],
        mut visit: impl FnMut(usize, f64, &[f64]),
    ) -> Result<()> {
        let n = self.dim();
        let norm = self.norm_bound();
        let cluster_gap = 1e-5 * norm;
        let shift_step = 10.0 * f64::EPSILON * norm;
        let mut cluster: Vec<Vec<f64>> = Vec::new();
        let mut last_shift = f64::NEG_INFINITY;
        let mut rng = SplitMix(0x5eed_2024);
        let mut lu = PivotedLu::with_dim(n);
        for (k, &lambda) in eigenvalues.iter().enumerate() {
            if k == 0 || lambda - eigenvalues[k - 1] > cluster_gap {
                cluster.clear();
                last_shift = f64::NEG_INFINITY;
            }
            let shift = if lambda <= last_shift + shift_step { last_shift + shift_step } else { lambda };
            last_shift = shift;
            lu.factor(self, shift, f64::EPSILON * norm);

            let mut x: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
            normalize(&mut x);
            let mut best = f64::INFINITY;
            let mut converged = None;
            for iteration in 0..8 {
                lu.solve(&mut x);
                for _ in 0..2 {
                    for q in &cluster {
                        let dot: f64 = q.iter().zip(&x).map(|(a, b)| a * b).sum();
                        for (xi, qi) in x.iter_mut().zip(q) {
                            *xi -= dot * qi;
                        }
                    }
                }
                if normalize(&mut x) == 0.0 {
                    x = (0..n).map(|_| rng.uniform() - 0.5).collect();
                    normalize(&mut x);
                    continue;
                }
                let r = self.residual(lambda, &x);
                if iteration >= 1 && (r <= 4.0 * f64::EPSILON * norm || r > 0.5 * best) {
                    converged = Some(r.min(best));
                    best = best.min(r);
                    break;
                }
                best = best.min(r);
            }
            let r = converged.unwrap_or(best);
            if !(r <= 1e-6 * lambda.abs().max(1.0)) {
                return Err(Error::NoConvergence { index: k, iterations: 8 });
            }
            fix_sign(&mut x);
            visit(k, lambda, &x);
            cluster.push(x);
        }
        Ok(())
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s > 0.0 && s.is_finite() {
        for v in x.iter_mut() {
            *v /= s;
        }
        s
    } else {
        0.0
    }
}

/// Make the first component of magnitude above `1e-8·max|v|` positive.
pub(crate) fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * max) {
        if *first < 0.0 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
    }
}

/// Deterministic start vectors for inverse iteration.
struct SplitMix(u64);

impl SplitMix {
    fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// LU factorization of `T - σ` with partial pivoting (row interchanges only
/// between neighbours, so `U` has two superdiagonals).
struct PivotedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn with_dim(n: usize) -> Self {
        Self {
            d: alloc::vec![0.0; n],
            du: alloc::vec![0.0; n.saturating_sub(1)],
            du2: alloc::vec![0.0; n.saturating_sub(2)],
            dl: alloc::vec![0.0; n.saturating_sub(1)],
            swapped: alloc::vec![false; n.saturating_sub(1)],
        }
    }

    fn factor(&mut self, t: &TridiagonalOperator, shift: f64, tiny: f64) {
        let n = t.dim();
        for i in 0..n {
            self.d[i] = t.diag[i] - shift;
        }
        self.du.copy_from_slice(&t.off);
        self.dl.copy_from_slice(&t.off);
        self.du2.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n.saturating_sub(1) {
            if self.d[i].abs() >= self.dl[i].abs() {
                self.swapped[i] = false;
                let fact = if self.d[i] != 0.0 { self.dl[i] / self.d[i] } else { 0.0 };
                self.dl[i] = fact;
                self.d[i + 1] -= fact * self.du[i];
            } else {
                self.swapped[i] = true;
                let fact = self.d[i] / self.dl[i];
                self.d[i] = self.dl[i];
                self.dl[i] = fact;
                let temp = self.du[i];
                self.du[i] = self.d[i + 1];
                self.d[i + 1] = temp - fact * self.d[i + 1];
                if i + 2 < n {
                    self.du2[i] = self.du[i + 1];
                    self.du[i + 1] *= -fact;
                }
            }
        }
        for v in self.d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}
