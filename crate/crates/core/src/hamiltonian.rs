//! Finite-difference single-particle Hamiltonians `-Δ + V` and their spectra.
//!
//! On a [`Grid1D`] the wave function is pinned to zero at `x_0 = -L` (which is
//! also the periodic image of `+L`), so the unknowns are the `n - 1` interior
//! samples `x_1 .. x_{n-1}`. On a [`RadialGrid`] the reduced radial function
//! `u = r R` vanishes at the origin and at the wall `r_n = r_max`, leaving the
//! unknowns `r_1 .. r_{n-1}`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, RadialGrid, WaveFunction};
use crate::tridiag::TridiagonalOperator;

/// External potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `c² (x² - R²)` outside `|x| < R`, zero inside.
    TruncatedHarmonic { radius: f64, coupling: f64 },
    /// `c² x² + U(x) + offset` with `U` sampled on the operator's grid.
    General { coupling: f64, offset: f64, extra: Vec<f64> },
}

impl PotentialSpec {
    pub fn truncated_harmonic(radius: f64, coupling: f64) -> Self {
        PotentialSpec::TruncatedHarmonic { radius, coupling }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::TruncatedHarmonic { radius, coupling } => {
                if !(*radius >= 0.0) || !radius.is_finite() {
                    return Err(Error::config(alloc::format!("trap radius must be non-negative, got {radius}")));
                }
                if !coupling.is_finite() {
                    return Err(Error::config("trap coupling must be finite"));
                }
                Ok(())
            }
            PotentialSpec::General { coupling, offset, extra } => {
                if !coupling.is_finite() || !offset.is_finite() || extra.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config("potential entries must be finite"));
                }
                Ok(())
            }
        }
    }

    /// Value at distance `x` from the origin (not available for sampled potentials).
    pub fn value(&self, x: f64) -> Option<f64> {
        match self {
            PotentialSpec::Free => Some(0.0),
            PotentialSpec::TruncatedHarmonic { radius, coupling } => {
                Some(coupling * coupling * (x * x - radius * radius).max(0.0))
            }
            PotentialSpec::General { .. } => None,
        }
    }

    /// Samples on every point of `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            PotentialSpec::General { coupling, offset, extra } => {
                if extra.len() != grid.len() {
                    return Err(Error::GridMismatch(alloc::format!(
                        "potential has {} samples, grid has {}",
                        extra.len(),
                        grid.len()
                    )));
                }
                Ok(grid
                    .points()
                    .zip(extra)
                    .map(|(x, u)| coupling * coupling * x * x + u + offset)
                    .collect())
            }
            other => Ok(grid.points().map(|x| other.value(x).unwrap_or(0.0)).collect()),
        }
    }
}

/// Where the unknowns of a discretized operator live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Line(Grid1D),
    Radial { grid: RadialGrid, l: u32 },
}

impl Layout {
    /// Cell width: `dx` or `dr`.
    pub fn spacing(&self) -> f64 {
        match self {
            Layout::Line(g) => g.dx(),
            Layout::Radial { grid, .. } => grid.dr(),
        }
    }
}

/// A discretized Hamiltonian together with its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    operator: TridiagonalOperator,
    layout: Layout,
}

/// Three-point discretization of `-d²/dx² + V` on the interior of `grid`.
pub fn assemble(grid: &Grid1D, potential: &PotentialSpec) -> Result<Hamiltonian> {
    let v = potential.sample(grid)?;
    let h2 = 1.0 / (grid.dx() * grid.dx());
    let n = grid.len();
    let diag: Vec<f64> = (1..n).map(|j| 2.0 * h2 + v[j]).collect();
    let off = alloc::vec![-h2; n - 2];
    Ok(Hamiltonian { operator: TridiagonalOperator::new(diag, off)?, layout: Layout::Line(*grid) })
}

/// Radial operator `-d²/dr² + l(l+1)/r² + V(r)` acting on `u = r R`.
pub fn radial_assemble(grid: &RadialGrid, l: i32, potential: &PotentialSpec) -> Result<Hamiltonian> {
    if l < 0 {
        return Err(Error::config(alloc::format!("angular momentum must be non-negative, got {l}")));
    }
    potential.validate()?;
    if matches!(potential, PotentialSpec::General { .. }) {
        return Err(Error::config("radial operators take a free or truncated harmonic potential"));
    }
    let h2 = 1.0 / (grid.dr() * grid.dr());
    let centrifugal = (l * (l + 1)) as f64;
    let n = grid.len();
    let diag: Vec<f64> = (1..n)
        .map(|j| {
            let r = grid.r(j);
            2.0 * h2 + centrifugal / (r * r) + potential.value(r).unwrap_or(0.0)
        })
        .collect();
    let off = alloc::vec![-h2; n - 2];
    Ok(Hamiltonian {
        operator: TridiagonalOperator::new(diag, off)?,
        layout: Layout::Radial { grid: *grid, l: l as u32 },
    })
}

impl Hamiltonian {
    pub fn operator(&self) -> &TridiagonalOperator {
        &self.operator
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// Full eigendecomposition.
    pub fn diagonalize(&self) -> Result<SpectralDecomposition> {
        let values = self.operator.eigenvalues()?;
        self.decompose(values, true)
    }

    /// The `count` lowest eigenpairs.
    pub fn lowest(&self, count: usize) -> Result<SpectralDecomposition> {
        let values = self.operator.lowest_eigenvalues(count);
        let complete = values.len() == self.dim();
        self.decompose(values, complete)
    }

    /// Every eigenpair with eigenvalue below `energy`.
    pub fn below(&self, energy: f64) -> Result<SpectralDecomposition> {
        let values = self.operator.eigenvalues_below(energy);
        let complete = values.len() == self.dim();
        self.decompose(values, complete)
    }

    fn decompose(&self, eigenvalues: Vec<f64>, complete: bool) -> Result<SpectralDecomposition> {
        let vectors = self.operator.eigenvectors(&eigenvalues)?;
        Ok(SpectralDecomposition { layout: self.layout, dim: self.dim(), eigenvalues, vectors, complete })
    }
}

/// Eigenpairs of a [`Hamiltonian`], lowest first.
///
/// Vectors are stored in the Euclidean normalization of the unknowns; the
/// grid functions returned by [`SpectralDecomposition::wavefunction`] carry the
/// `1/√dx` factor that makes them unit vectors in `L²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    layout: Layout,
    dim: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    complete: bool,
}

impl SpectralDecomposition {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Whether every eigenpair of the operator is present.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// Unit Euclidean eigenvector on the unknowns.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn line_grid(&self) -> Result<&Grid1D> {
        match &self.layout {
            Layout::Line(g) => Ok(g),
            Layout::Radial { .. } => Err(Error::usage("radial decomposition has no line grid")),
        }
    }

    /// Eigenfunction `k` as an `L²`-normalized grid function (zero at `x_0`).
    pub fn wavefunction(&self, k: usize) -> Result<WaveFunction> {
        let grid = *self.line_grid()?;
        let scale = 1.0 / grid.dx().sqrt();
        let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
        for (slot, v) in values[1..].iter_mut().zip(self.vector(k)) {
            *slot = Complex64::new(v * scale, 0.0);
        }
        WaveFunction::new(grid, values)
    }

    /// Reduced radial function `u(r_j)` at `r_1 .. r_{n-1}`, normalized so that
    /// `Σ u² dr = 1`.
    pub fn radial_profile(&self, k: usize) -> Result<Vec<(f64, f64)>> {
        match &self.layout {
            Layout::Radial { grid, .. } => {
                let scale = 1.0 / grid.dr().sqrt();
                Ok(self.vector(k).iter().enumerate().map(|(i, v)| (grid.r(i + 1), v * scale)).collect())
            }
            Layout::Line(_) => Err(Error::usage("line decomposition has no radial profile")),
        }
    }

    /// Largest `L²`-normalized amplitude on the samples next to the walls.
    pub fn edge_amplitude(&self, k: usize) -> f64 {
        let v = self.vector(k);
        let scale = 1.0 / self.layout.spacing().sqrt();
        match self.layout {
            Layout::Line(_) => v[0].abs().max(v[v.len() - 1].abs()) * scale,
            Layout::Radial { .. } => v[v.len() - 1].abs() * scale,
        }
    }

    /// Expansion coefficients `⟨ψ_k, f⟩` for every stored mode.
    pub fn coefficients(&self, f: &WaveFunction) -> Result<Vec<Complex64>> {
        let grid = self.line_grid()?;
        if f.grid() != grid {
            return Err(Error::GridMismatch("function and decomposition use different grids".into()));
        }
        let s = grid.dx().sqrt();
        let fv = &f.values()[1..];
        Ok((0..self.len())
            .map(|k| {
                let acc: Complex64 = self.vector(k).iter().zip(fv).map(|(a, b)| b * *a).sum();
                acc * s
            })
            .collect())
    }

    /// `Σ_k c_k ψ_k` as a grid function.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<WaveFunction> {
        let grid = *self.line_grid()?;
        let scale = 1.0 / grid.dx().sqrt();
        let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
        for (k, c) in coefficients.iter().enumerate().take(self.len()) {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let ck = c * scale;
            for (slot, v) in values[1..].iter_mut().zip(self.vector(k)) {
                *slot += ck * *v;
            }
        }
        WaveFunction::new(grid, values)
    }

    /// Largest scaled residual `‖Hv - εv‖/max(1,|ε|)` and largest deviation of
    /// the Gram matrix from the identity.
    pub fn quality(&self, hamiltonian: &Hamiltonian) -> (f64, f64) {
        let op = hamiltonian.operator();
        let mut residual = 0.0f64;
        let mut orth = 0.0f64;
        for k in 0..self.len() {
            let e = self.eigenvalue(k);
            residual = residual.max(op.residual(e, self.vector(k)) / e.abs().max(1.0));
            for m in 0..=k {
                let dot: f64 = self.vector(k).iter().zip(self.vector(m)).map(|(a, b)| a * b).sum();
                let target = if k == m { 1.0 } else { 0.0 };
                orth = orth.max((dot - target).abs());
            }
        }
        (residual, orth)
    }
}

/// Reflection parity of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Classify `ψ` as even or odd under `x → -x` to tolerance `1e-6` in `L²`.
pub fn parity_of(psi: &WaveFunction) -> Option<Parity> {
    let r = psi.reflected();
    let norm = psi.norm();
    if r.sub(psi).ok()?.norm() <= 1e-6 * norm {
        Some(Parity::Even)
    } else if r.add(psi).ok()?.norm() <= 1e-6 * norm {
        Some(Parity::Odd)
    } else {
        None
    }
}

/// Eigenpair `k` of a line decomposition with its parity.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub energy: f64,
    pub wavefunction: WaveFunction,
    pub parity: Option<Parity>,
}

/// The two lowest modes (ground state and first excited state).
pub fn ground_pair(decomposition: &SpectralDecomposition) -> Result<(Mode, Mode)> {
    if decomposition.len() < 2 {
        return Err(Error::usage("need at least two eigenpairs"));
    }
    let mode = |k: usize| -> Result<Mode> {
        let wavefunction = decomposition.wavefunction(k)?;
        Ok(Mode { energy: decomposition.eigenvalue(k), parity: parity_of(&wavefunction), wavefunction })
    };
    Ok((mode(0)?, mode(1)?))
}
