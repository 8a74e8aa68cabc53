//! Gauge-invariant quasifree states of the free Bose gas: thermal clouds,
//! coherent condensates, and the expectation values built from them.
//!
//! A state is fixed by its one-particle density matrix
//! `T = (e^{β(H-μ)} - 1)^{-1}` (the thermal cloud) plus an optional condensate
//! `κ h`, so that `ω(a*(f) a(g)) = ⟨g, T f⟩ + κ² ⟨h, f⟩ ⟨g, h⟩`.
//!
//! The thermal cloud is either spectral (a decomposition of a trapped
//! Hamiltonian on a grid) or homogeneous (the infinite-volume limit, where
//! `T` acts as the Fourier multiplier `n(p²)`).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{inner, WaveFunction};
use crate::hamiltonian::SpectralDecomposition;
use crate::quadrature::{self, gauss_legendre_on};
use crate::special::{bose_occupation, bump_profile};

/// Eigenvalues closer than this to `μ` are rejected.
pub const MU_SAFETY: f64 = 1e-6;

/// Occupations are treated as zero beyond this size.
const NEGLIGIBLE_OCCUPATION: f64 = 1e-13;

/// Quadrature tolerance used for every momentum integral.
const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ThermalCloud {
    Absent,
    /// Occupations of the eigenmodes of a trapped Hamiltonian.
    Trapped(SpectralDecomposition),
    /// Infinite-volume cloud in dimension 1, 2 or 3.
    Homogeneous { dimension: u32 },
}

/// Condensate mode, either sampled or one of the zero-energy limit
/// distributions `1`, `x` and `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum CondensateMode {
    Grid(WaveFunction),
    Even,
    Odd,
    /// The 3D `l = 1` limit `h(x) = z`; paired with radial test functions only
    /// through [`crate::condensate`].
    L1,
}

impl CondensateMode {
    /// `⟨h, f⟩`.
    pub fn pairing(&self, f: &WaveFunction) -> Result<Complex64> {
        match self {
            CondensateMode::Grid(h) => inner(h, f),
            CondensateMode::Even => Ok(f.integral()),
            CondensateMode::Odd => Ok(f.first_moment()),
            CondensateMode::L1 => Err(Error::usage("the l = 1 limit pairs with 3D test functions")),
        }
    }

    /// `|h(x)|²`, interpolating sampled modes linearly.
    pub fn density(&self, x: f64) -> Result<f64> {
        match self {
            CondensateMode::Grid(h) => interpolate(h.grid(), x, |j| h.at(j).norm_sqr()),
            CondensateMode::Even => Ok(1.0),
            CondensateMode::Odd => Ok(x * x),
            CondensateMode::L1 => Err(Error::usage("the l = 1 limit has no 1D density")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condensate {
    pub kappa: f64,
    pub mode: CondensateMode,
}

impl Condensate {
    pub fn new(kappa: f64, mode: CondensateMode) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::config(alloc::format!("condensate amplitude must be non-negative, got {kappa}")));
        }
        Ok(Self { kappa, mode })
    }
}

/// Gauge-invariant quasifree state `ω_{β,μ,κ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasifreeState {
    beta: f64,
    mu: f64,
    thermal: ThermalCloud,
    condensate: Option<Condensate>,
}

impl QuasifreeState {
    pub fn new(beta: f64, mu: f64, thermal: ThermalCloud, condensate: Option<Condensate>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::config(alloc::format!("β must be positive, got {beta}")));
        }
        if !(mu <= 0.0) {
            return Err(Error::config(alloc::format!("μ must be non-positive, got {mu}")));
        }
        match &thermal {
            ThermalCloud::Absent => {}
            ThermalCloud::Trapped(d) => {
                if d.is_empty() {
                    return Err(Error::config("trapped cloud needs at least one eigenpair"));
                }
                if d.line_grid().is_err() {
                    return Err(Error::usage("trapped cloud needs a line decomposition"));
                }
                if !(mu < d.eigenvalue(0) - MU_SAFETY) {
                    return Err(Error::domain(alloc::format!(
                        "μ = {mu} is within {MU_SAFETY:e} of the ground energy {}",
                        d.eigenvalue(0)
                    )));
                }
                if !d.is_complete() {
                    let top = d.eigenvalue(d.len() - 1);
                    let tail = bose_occupation(beta, top, mu);
                    if tail > NEGLIGIBLE_OCCUPATION {
                        return Err(Error::Truncation { weight: tail, limit: NEGLIGIBLE_OCCUPATION });
                    }
                }
            }
            ThermalCloud::Homogeneous { dimension } => {
                if !(1..=3).contains(dimension) {
                    return Err(Error::config("homogeneous clouds exist in dimensions 1, 2, 3"));
                }
                if *dimension < 3 && mu >= 0.0 {
                    return Err(Error::domain(alloc::format!(
                        "μ = 0 makes the density diverge in dimension {dimension}"
                    )));
                }
            }
        }
        Ok(Self { beta, mu, thermal, condensate })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn thermal(&self) -> &ThermalCloud {
        &self.thermal
    }

    pub fn condensate(&self) -> Option<&Condensate> {
        self.condensate.as_ref()
    }

    /// Bose occupations of the stored eigenmodes (trapped clouds only).
    pub fn occupations(&self) -> Result<Vec<f64>> {
        match &self.thermal {
            ThermalCloud::Trapped(d) => Ok(d.eigenvalues().iter().map(|&e| bose_occupation(self.beta, e, self.mu)).collect()),
            _ => Err(Error::usage("occupation tables exist for trapped clouds only")),
        }
    }

    fn n(&self, p2: f64) -> f64 {
        bose_occupation(self.beta, p2, self.mu)
    }

    fn require_line(&self) -> Result<()> {
        match &self.thermal {
            ThermalCloud::Homogeneous { dimension } if *dimension != 1 => {
                Err(Error::usage("grid functions pair with a one-dimensional cloud"))
            }
            _ => Ok(()),
        }
    }

    /// Momentum cutoff beyond which `n(p²)` is below `e^{-50}`.
    fn p_cut(&self) -> f64 {
        (50.0 / self.beta + self.mu).max(1.0).sqrt()
    }

    /// Breakpoints on `[0, p_cut]` that resolve the `n(p²)` peak near the origin.
    fn momentum_breaks(&self) -> Vec<f64> {
        let cut = self.p_cut();
        let mut breaks = alloc::vec![0.0];
        if self.mu < 0.0 {
            let w = (-self.mu).sqrt();
            for s in [w, 10.0 * w] {
                if s < cut {
                    breaks.push(s);
                }
            }
        }
        breaks.push(cut);
        breaks
    }

    /// `∫ dp conj(ĝ) f̂ n(p²) e^{itp²}` over the real line.
    fn homogeneous_line_thermal(&self, f: &WaveFunction, g: &WaveFunction, t: f64) -> Result<Complex64> {
        let breaks = self.momentum_breaks();
        let mut total = Complex64::new(0.0, 0.0);
        let scale = f.norm() * g.norm();
        for sign in [-1.0, 1.0] {
            for w in breaks.windows(2) {
                let piece = quadrature::integrate_with(
                    |q: f64| {
                        let p = sign * q;
                        g.fourier_at(p).conj() * f.fourier_at(p) * self.n(p * p) * Complex64::new(0.0, t * p * p).exp()
                    },
                    w[0],
                    w[1],
                    REL_TOL,
                    1e-15 * scale,
                )?;
                total += piece.value;
            }
        }
        Ok(total)
    }

    /// `⟨g, T e^{itH} f⟩` for the thermal cloud.
    fn thermal_term(&self, f: &WaveFunction, g: &WaveFunction, t: f64) -> Result<Complex64> {
        match &self.thermal {
            ThermalCloud::Absent => Ok(Complex64::new(0.0, 0.0)),
            ThermalCloud::Trapped(d) => {
                let cf = d.coefficients(f)?;
                let cg = d.coefficients(g)?;
                Ok(d
                    .eigenvalues()
                    .iter()
                    .zip(cf.iter().zip(&cg))
                    .map(|(&e, (a, b))| b.conj() * a * bose_occupation(self.beta, e, self.mu) * Complex64::new(0.0, t * e).exp())
                    .sum())
            }
            ThermalCloud::Homogeneous { .. } => {
                self.require_line()?;
                if f.grid() != g.grid() {
                    return Err(Error::GridMismatch("test functions use different grids".into()));
                }
                self.homogeneous_line_thermal(f, g, t)
            }
        }
    }

    fn condensate_term(&self, f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
        match &self.condensate {
            Some(c) if c.kappa > 0.0 => {
                let hf = c.mode.pairing(f)?;
                let hg = c.mode.pairing(g)?;
                Ok(hf * hg.conj() * (c.kappa * c.kappa))
            }
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// `ω(a*(f) a(g)) = ⟨g, T f⟩ + κ² ⟨h, f⟩ ⟨g, h⟩`.
    pub fn two_point(&self, f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
        Ok(self.thermal_term(f, g, 0.0)? + self.condensate_term(f, g)?)
    }

    /// Thermal part `⟨g, T f⟩` alone.
    pub fn thermal_two_point(&self, f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
        self.thermal_term(f, g, 0.0)
    }

    /// `Σ_k (n_k - e^{-β(ε_k-μ)}(1 + n_k)) ⟨g,ψ_k⟩⟨ψ_k,f⟩`, which vanishes for the
    /// Bose density matrix.
    pub fn kms_defect(&self, f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
        let ThermalCloud::Trapped(d) = &self.thermal else {
            return Err(Error::usage("the spectral KMS identity needs a trapped cloud"));
        };
        let cf = d.coefficients(f)?;
        let cg = d.coefficients(g)?;
        Ok(d
            .eigenvalues()
            .iter()
            .zip(cf.iter().zip(&cg))
            .map(|(&e, (a, b))| {
                let n = bose_occupation(self.beta, e, self.mu);
                let shifted = (-self.beta * (e - self.mu)).exp() * (1.0 + n);
                b.conj() * a * (n - shifted)
            })
            .sum())
    }

    /// Thermal density `Σ_k n_k |ψ_k(x)|²` (trapped) or the homogeneous value.
    pub fn thermal_density(&self, x: f64) -> Result<f64> {
        match &self.thermal {
            ThermalCloud::Absent => Ok(0.0),
            ThermalCloud::Trapped(d) => {
                let grid = *d.line_grid()?;
                let occupations = self.occupations()?;
                let inv_dx = 1.0 / grid.dx();
                interpolate(&grid, x, |j| {
                    if j == 0 {
                        return 0.0;
                    }
                    occupations
                        .iter()
                        .enumerate()
                        .map(|(k, n)| n * d.vector(k)[j - 1] * d.vector(k)[j - 1] * inv_dx)
                        .sum()
                })
            }
            ThermalCloud::Homogeneous { dimension } => homogeneous_density(self.beta, self.mu, *dimension),
        }
    }

    /// Mean particle density at `x`: thermal density plus `κ² |h(x)|²`.
    pub fn position_density(&self, x: f64) -> Result<f64> {
        let condensate = match &self.condensate {
            Some(c) if c.kappa > 0.0 => c.kappa * c.kappa * c.mode.density(x)?,
            _ => 0.0,
        };
        Ok(self.thermal_density(x)? + condensate)
    }

    /// Mean number of particles in `[a, b]`. Sampled densities are summed over
    /// grid points with `a ≤ x_j < b`, so counts are additive over adjacent
    /// regions.
    pub fn local_particle_number(&self, a: f64, b: f64) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::config("region must satisfy a ≤ b"));
        }
        if a == b {
            return Ok(0.0);
        }
        let thermal = match &self.thermal {
            ThermalCloud::Absent => 0.0,
            ThermalCloud::Trapped(d) => {
                let grid = *d.line_grid()?;
                check_region(grid.half_width(), a, b)?;
                let occupations = self.occupations()?;
                let mut total = 0.0;
                for (k, n) in occupations.iter().enumerate() {
                    let v = d.vector(k);
                    let s: f64 = (1..grid.len())
                        .filter(|&j| grid.x(j) >= a && grid.x(j) < b)
                        .map(|j| v[j - 1] * v[j - 1])
                        .sum();
                    total += n * s;
                }
                total
            }
            ThermalCloud::Homogeneous { dimension: 1 } => homogeneous_density(self.beta, self.mu, 1)? * (b - a),
            ThermalCloud::Homogeneous { .. } => return Err(Error::usage("line regions need a 1D cloud")),
        };
        let condensate = match &self.condensate {
            Some(c) if c.kappa > 0.0 => {
                let k2 = c.kappa * c.kappa;
                match &c.mode {
                    CondensateMode::Grid(h) => {
                        let grid = h.grid();
                        check_region(grid.half_width(), a, b)?;
                        k2 * grid
                            .points()
                            .zip(h.values())
                            .filter(|(x, _)| *x >= a && *x < b)
                            .map(|(_, v)| v.norm_sqr())
                            .sum::<f64>()
                            * grid.dx()
                    }
                    CondensateMode::Even => k2 * (b - a),
                    CondensateMode::Odd => k2 * (b * b * b - a * a * a) / 3.0,
                    CondensateMode::L1 => return Err(Error::usage("the l = 1 limit has no 1D count")),
                }
            }
            _ => 0.0,
        };
        Ok(thermal + condensate)
    }

    /// `∫₀^∞ e^{-uλ - u²σ²/2} du` with `σ² = ⟨f, T f⟩`.
    pub fn field_resolvent_expectation(&self, lambda: f64, f: &WaveFunction) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain(alloc::format!("λ must be positive, got {lambda}")));
        }
        self.require_no_condensate_on(f)?;
        let sigma2 = self.thermal_two_point(f, f)?.re.max(0.0);
        field_resolvent_integral(lambda, sigma2)
    }

    /// `ω((λ + a*(f) a(f))^{-1})` from the geometric occupation law of the
    /// mode `f/‖f‖` with mean `n̄ = ⟨f, T f⟩/‖f‖²`.
    pub fn number_resolvent_expectation(&self, lambda: f64, f: &WaveFunction) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain(alloc::format!("λ must be positive, got {lambda}")));
        }
        self.require_no_condensate_on(f)?;
        let norm2 = f.norm().powi(2);
        if norm2 == 0.0 {
            return Ok(1.0 / lambda);
        }
        let mean = self.thermal_two_point(f, f)?.re.max(0.0) / norm2;
        geometric_resolvent(lambda, norm2, mean)
    }

    fn require_no_condensate_on(&self, f: &WaveFunction) -> Result<()> {
        if let Some(c) = &self.condensate {
            if c.kappa > 0.0 && c.mode.pairing(f)?.norm() > 1e-12 * f.norm().max(1.0) {
                return Err(Error::usage(
                    "resolvent expectations are implemented for test functions orthogonal to the condensate",
                ));
            }
        }
        Ok(())
    }

    /// `⟨g, T e^{itH} f⟩ + κ² ⟨h, e^{itH} f⟩ ⟨g, h⟩` for line test functions.
    ///
    /// The zero-energy limit modes are invariant, so their condensate term does
    /// not depend on `t`; sampled modes are evolved spectrally.
    pub fn temporal_correlation(&self, f: &WaveFunction, g: &WaveFunction, t: f64) -> Result<Correlation> {
        if let ThermalCloud::Trapped(d) = &self.thermal {
            if !d.is_complete() && t != 0.0 {
                return Err(Error::usage("trapped correlations need every eigenpair"));
            }
        }
        let thermal = self.thermal_term(f, g, t)?;
        let condensate = match &self.condensate {
            Some(c) if c.kappa > 0.0 => {
                let hg = c.mode.pairing(g)?;
                let hf = match (&c.mode, &self.thermal) {
                    (CondensateMode::Grid(h), ThermalCloud::Trapped(d)) => {
                        let ch = d.coefficients(h)?;
                        let cf = d.coefficients(f)?;
                        d.eigenvalues()
                            .iter()
                            .zip(ch.iter().zip(&cf))
                            .map(|(&e, (a, b))| a.conj() * b * Complex64::new(0.0, t * e).exp())
                            .sum()
                    }
                    (CondensateMode::Grid(_), _) if t != 0.0 => {
                        return Err(Error::usage("a sampled condensate evolves only with a trapped cloud"))
                    }
                    _ => c.mode.pairing(f)?,
                };
                hf * hg.conj() * (c.kappa * c.kappa)
            }
            _ => Complex64::new(0.0, 0.0),
        };
        Ok(Correlation { thermal, condensate })
    }

    /// Temporal correlation of radial 3D test functions in the homogeneous
    /// `s = 3` cloud; the condensate is the constant zero-energy mode.
    pub fn temporal_correlation_3d(&self, f: &RadialBump, g: &RadialBump, t: f64) -> Result<Correlation> {
        match self.thermal {
            ThermalCloud::Homogeneous { dimension: 3 } => {}
            ThermalCloud::Absent => {}
            _ => return Err(Error::domain("3D correlations need the homogeneous s = 3 cloud")),
        }
        let thermal = match self.thermal {
            ThermalCloud::Absent => Complex64::new(0.0, 0.0),
            _ => radial_thermal_correlation(self.beta, self.mu, f, g, t)?,
        };
        let condensate = match &self.condensate {
            Some(c) if c.kappa > 0.0 => match c.mode {
                CondensateMode::Even => Complex64::new(c.kappa * c.kappa * f.integral() * g.integral(), 0.0),
                _ => return Err(Error::usage("the 3D memory experiment uses the constant condensate mode")),
            },
            _ => Complex64::new(0.0, 0.0),
        };
        Ok(Correlation { thermal, condensate })
    }
}

/// The two parts of a temporal correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub thermal: Complex64,
    pub condensate: Complex64,
}

impl Correlation {
    pub fn total(&self) -> Complex64 {
        self.thermal + self.condensate
    }
}

fn check_region(half_width: f64, a: f64, b: f64) -> Result<()> {
    if a < -half_width || b > half_width {
        return Err(Error::config(alloc::format!("region [{a}, {b}] leaves the box [-{half_width}, {half_width}]")));
    }
    Ok(())
}

fn interpolate(grid: &crate::grid::Grid1D, x: f64, value: impl Fn(usize) -> f64) -> Result<f64> {
    let l = grid.half_width();
    if x < -l || x > l {
        return Err(Error::config(alloc::format!("point {x} lies outside the box")));
    }
    let s = x / grid.dx() + (grid.len() / 2) as f64;
    let j = s.floor();
    let frac = s - j;
    let j = j as usize;
    let at = |i: usize| if i >= grid.len() { value(0) } else { value(i) };
    if frac == 0.0 {
        Ok(at(j))
    } else {
        Ok((1.0 - frac) * at(j) + frac * at(j + 1))
    }
}

/// `(2π)^{-s} ∫ d^s p n(p²)`, the particle density of the homogeneous cloud.
pub fn homogeneous_density(beta: f64, mu: f64, dimension: u32) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::config("β must be positive"));
    }
    if !(1..=3).contains(&dimension) {
        return Err(Error::config("dimension must be 1, 2 or 3"));
    }
    if mu > 0.0 || (dimension < 3 && mu >= 0.0) {
        return Err(Error::domain(alloc::format!("density diverges at μ = {mu} in dimension {dimension}")));
    }
    let measure = |p: f64| match dimension {
        1 => 2.0,
        2 => 2.0 * PI * p,
        _ => 4.0 * PI * p * p,
    };
    let state = QuasifreeState { beta, mu, thermal: ThermalCloud::Absent, condensate: None };
    let mut total = 0.0;
    for w in state.momentum_breaks().windows(2) {
        total += quadrature::integrate(
            |p| {
                let e = beta * (p * p - mu);
                if e == 0.0 {
                    // s = 3, μ = 0: p²/(e^{βp²}-1) → 1/β
                    4.0 * PI / beta
                } else {
                    measure(p) / libm::expm1(e)
                }
            },
            w[0],
            w[1],
            1e-12,
        )?
        .value;
    }
    Ok(total / (2.0 * PI).powi(dimension as i32))
}

/// `∫₀^∞ e^{-uλ - u²σ²/2} du` by adaptive quadrature.
pub fn field_resolvent_integral(lambda: f64, sigma2: f64) -> Result<f64> {
    if sigma2 == 0.0 {
        return Ok(1.0 / lambda);
    }
    let width = (1.0 / lambda).min(1.0 / sigma2.sqrt());
    let r = quadrature::integrate_to_infinity(
        |u: f64| (-u * lambda - 0.5 * u * u * sigma2).exp(),
        0.0,
        width,
        1e-12,
        1e-16 / lambda,
    )?;
    Ok(r.value)
}

/// `Σ_n (1-q) qⁿ/(λ + n‖f‖²)`, `q = n̄/(1+n̄)`, summed until the tail bound
/// `q^N/λ` drops below `1e-12`.
pub fn geometric_resolvent(lambda: f64, norm2: f64, mean: f64) -> Result<f64> {
    if mean == 0.0 {
        return Ok(1.0 / lambda);
    }
    let q = mean / (1.0 + mean);
    let mut weight = 1.0 - q;
    let mut tail = 1.0;
    let mut total = 0.0;
    let mut n = 0u64;
    while tail / lambda >= 1e-12 {
        total += weight / (lambda + n as f64 * norm2);
        weight *= q;
        tail *= q;
        n += 1;
        if n > 200_000_000 {
            return Err(Error::NoConvergence { index: 0, iterations: n as usize });
        }
    }
    Ok(total)
}

/// Outcome of a `μ ↗ 0` scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuLimitVerdict {
    Vanishes,
    ConvergesPositive,
    Undetermined,
}

impl MuLimitVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            MuLimitVerdict::Vanishes => "vanishes",
            MuLimitVerdict::ConvergesPositive => "converges-positive",
            MuLimitVerdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuLimitRow {
    pub mu: f64,
    pub mean_occupation: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuLimitScan {
    pub rows: Vec<MuLimitRow>,
    pub verdict: MuLimitVerdict,
    /// Largest difference between any two of the last three values.
    pub tail_spread: f64,
    /// Last value divided by the first.
    pub ratio: f64,
}

/// `ω(A(λ, f))` in the homogeneous 1D cloud along `μ_list ↗ 0`, optionally
/// with a constant-mode condensate of amplitude `kappa`.
pub fn mu_limit_scan(lambda: f64, f: &WaveFunction, beta: f64, mu_list: &[f64], kappa: f64) -> Result<MuLimitScan> {
    if mu_list.len() < 3 {
        return Err(Error::config("a μ scan needs at least 3 values"));
    }
    if mu_list.windows(2).any(|w| w[1] <= w[0]) || mu_list.iter().any(|m| *m >= 0.0) {
        return Err(Error::config("μ values must ascend toward 0 from below"));
    }
    let condensate = if kappa > 0.0 { Some(Condensate::new(kappa, CondensateMode::Even)?) } else { None };
    let mut rows = Vec::with_capacity(mu_list.len());
    let norm2 = f.norm().powi(2);
    for &mu in mu_list {
        let state = QuasifreeState::new(beta, mu, ThermalCloud::Homogeneous { dimension: 1 }, condensate.clone())?;
        let value = state.number_resolvent_expectation(lambda, f)?;
        let mean_occupation = state.thermal_two_point(f, f)?.re / norm2;
        rows.push(MuLimitRow { mu, mean_occupation, value });
    }
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let ratio = values[values.len() - 1] / values[0];
    let tail = &values[values.len() - 3..];
    let tail_spread = tail.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - tail.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let verdict = if decreasing && ratio < 0.05 {
        MuLimitVerdict::Vanishes
    } else if tail_spread < 1e-4 && values[values.len() - 1] > 0.0 {
        MuLimitVerdict::ConvergesPositive
    } else {
        MuLimitVerdict::Undetermined
    };
    Ok(MuLimitScan { rows, verdict, tail_spread, ratio })
}

/// Radially symmetric 3D bump `φ(x) = A·exp(-1/(1-|x|²/a²))`, scaled so that
/// `∫ φ d³x = integral`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBump {
    radius: f64,
    amplitude: f64,
    integral: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialBump {
    const NODES: usize = 96;

    pub fn with_integral(radius: f64, integral: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::config("radial bump needs a positive radius"));
        }
        let (nodes, weights) = gauss_legendre_on(Self::NODES, 0.0, radius);
        let raw: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(r, w)| w * 4.0 * PI * r * r * bump_profile(r / radius))
            .sum();
        Ok(Self { radius, amplitude: integral / raw, integral, nodes, weights })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, r: f64) -> f64 {
        self.amplitude * bump_profile(r / self.radius)
    }

    /// `∫ φ d³x`.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// `φ̂(p) = (2π)^{-3/2} 4π ∫ r² φ(r) sin(pr)/(pr) dr`, for complex `p`.
    pub fn fourier(&self, p: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, w) in self.nodes.iter().zip(&self.weights) {
            let z = p * *r;
            let sinc = if z.norm() < 1e-4 {
                Complex64::new(1.0, 0.0) - z * z / 6.0 + z * z * z * z / 120.0
            } else {
                z.sin() / z
            };
            acc += sinc * (w * r * r * self.value(*r));
        }
        acc * (4.0 * PI / (2.0 * PI).powf(1.5))
    }
}

/// `4π ∫₀^∞ p² conj(ĝ(p)) f̂(p) n(p²) e^{itp²} dp` for real radial bumps. For
/// `t ≠ 0` the contour is rotated to `p = s e^{±iπ/8}`, where `e^{itp²}` decays
/// and the poles of `n` (on `arg p = π/4`) stay off the path.
pub fn radial_thermal_correlation(beta: f64, mu: f64, f: &RadialBump, g: &RadialBump, t: f64) -> Result<Complex64> {
    let theta = if t > 0.0 {
        PI / 8.0
    } else if t < 0.0 {
        -PI / 8.0
    } else {
        0.0
    };
    radial_thermal_on_ray(beta, mu, f, g, t, theta)
}

/// The same integral along the ray `p = s e^{iθ}`; `θ = 0` is the real axis.
pub fn radial_thermal_on_ray(beta: f64, mu: f64, f: &RadialBump, g: &RadialBump, t: f64, theta: f64) -> Result<Complex64> {
    let dir = Complex64::new(theta.cos(), theta.sin());
    let integrand = |s: f64| {
        let p = dir * s;
        let p2 = p * p;
        let x = (p2 - mu) * beta;
        // n(p²) p² with the removable singularity at p = 0 when μ = 0
        let np2 = if x.norm() < 1e-8 {
            if mu == 0.0 {
                Complex64::new(1.0 / beta, 0.0)
            } else {
                p2 / x
            }
        } else {
            p2 / (x.exp() - 1.0)
        };
        // conj(ĝ) for real radial g continues analytically as ĝ(p)
        g.fourier(p) * f.fourier(p) * np2 * (Complex64::new(0.0, t) * p2).exp() * dir * (4.0 * PI)
    };
    let decay = if theta == 0.0 { beta } else { beta * (2.0 * theta).cos() + t.abs() * (2.0 * theta).sin().abs() };
    let cut = (60.0 / decay).sqrt().max(1.0);
    let scale = f.integral().abs() * g.integral().abs() + 1e-300;
    let r = quadrature::integrate_with(integrand, 0.0, cut, 1e-11, 1e-16 * scale)?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bump, Grid1D};
    use crate::hamiltonian::{assemble, PotentialSpec};

    fn trapped_state(beta: f64, mu: f64, condensate: Option<Condensate>) -> (QuasifreeState, Grid1D) {
        let g = Grid1D::new(12.0, 256).unwrap();
        let d = assemble(&g, &PotentialSpec::truncated_harmonic(3.0, 1.0)).unwrap().diagonalize().unwrap();
        (QuasifreeState::new(beta, mu, ThermalCloud::Trapped(d), condensate).unwrap(), g)
    }

    #[test]
    fn vacuum_limit_and_pure_condensate() {
        let (s, g) = trapped_state(200.0, -1.0, None);
        let f = bump(0.0, 2.0, &g).unwrap();
        assert!(s.two_point(&f, &f).unwrap().norm() <= 1e-8);
        let c = Condensate::new(0.5, CondensateMode::Grid(f.clone())).unwrap();
        let (s, _) = trapped_state(200.0, -1.0, Some(c));
        assert!((s.two_point(&f, &f).unwrap() - 0.25).norm() <= 1e-8);
        let other = bump(5.0, 2.0, &g).unwrap();
        let c = Condensate::new(0.7, CondensateMode::Grid(f.clone())).unwrap();
        assert_eq!(c.mode.pairing(&other).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hermitian_and_gauge_invariant() {
        let (s, g) = trapped_state(1.0, -0.5, None);
        let f = bump(-1.0, 2.0, &g).unwrap();
        let h = bump(1.5, 1.5, &g).unwrap().scaled_complex(Complex64::new(0.3, 0.4));
        let a = s.two_point(&f, &h).unwrap();
        let b = s.two_point(&h, &f).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        let rotated = f.clone().scaled_complex(Complex64::new(0.0, 1.3).exp());
        let d0 = s.two_point(&f, &f).unwrap();
        let d1 = s.two_point(&rotated, &rotated).unwrap();
        assert!((d0 - d1).norm() < 1e-14 * d0.norm());
        assert!(s.kms_defect(&f, &h).unwrap().norm() < 1e-10);
    }

    #[test]
    fn mu_too_close_to_ground_energy_is_rejected() {
        let g = Grid1D::new(12.0, 256).unwrap();
        let d = assemble(&g, &PotentialSpec::truncated_harmonic(3.0, 1.0)).unwrap().lowest(5).unwrap();
        let e0 = d.eigenvalue(0);
        let full = assemble(&g, &PotentialSpec::truncated_harmonic(3.0, 1.0)).unwrap().diagonalize().unwrap();
        let lifted = PotentialSpec::General {
            coupling: 0.0,
            offset: 5e-7 - full.eigenvalue(0),
            extra: g.points().map(|x| PotentialSpec::truncated_harmonic(3.0, 1.0).value(x).unwrap()).collect(),
        };
        let near = assemble(&g, &lifted).unwrap().diagonalize().unwrap();
        assert!((near.eigenvalue(0) - 5e-7).abs() < 1e-9);
        assert!(matches!(QuasifreeState::new(1.0, 0.0, ThermalCloud::Trapped(near), None), Err(Error::Domain(_))));
        assert!(e0 > 0.0);
        assert!(QuasifreeState::new(1.0, 0.0, ThermalCloud::Trapped(full), None).is_ok());
        assert!(matches!(
            QuasifreeState::new(1.0, -0.1, ThermalCloud::Trapped(d), None),
            Err(Error::Truncation { .. })
        ));
        assert!(QuasifreeState::new(1.0, 0.0, ThermalCloud::Homogeneous { dimension: 1 }, None).is_err());
        assert!(QuasifreeState::new(1.0, 0.0, ThermalCloud::Homogeneous { dimension: 3 }, None).is_ok());
    }

    fn polylog(order: f64, z: f64) -> f64 {
        let mut s = 0.0;
        let mut zj = z;
        for j in 1..200_000 {
            let term = zj / (j as f64).powf(order);
            s += term;
            if term < 1e-17 * s {
                break;
            }
            zj *= z;
        }
        s
    }

    #[test]
    fn homogeneous_density_matches_polylog_series() {
        // n_1 = g_{1/2}(e^{βμ})/(2√(πβ)), n_2 = -ln(1-e^{βμ})/(4πβ), n_3 = g_{3/2}/(8(πβ)^{3/2})
        let (beta, mu) = (1.0, -1.0);
        let z = (beta * mu).exp();
        let n1 = polylog(0.5, z) / (2.0 * (PI * beta).sqrt());
        let n2 = -(1.0 - z).ln() / (4.0 * PI * beta);
        let n3 = polylog(1.5, z) / (8.0 * (PI * beta).powf(1.5));
        assert!((homogeneous_density(beta, mu, 1).unwrap() - n1).abs() < 1e-10 * n1);
        assert!((homogeneous_density(beta, mu, 2).unwrap() - n2).abs() < 1e-10 * n2);
        assert!((homogeneous_density(beta, mu, 3).unwrap() - n3).abs() < 1e-10 * n3);
        // critical density ζ(3/2)/(8π^{3/2})
        let crit = 2.612_375_348_685_488 / (8.0 * PI.powf(1.5));
        assert!((homogeneous_density(1.0, 0.0, 3).unwrap() - crit).abs() < 1e-8 * crit);
        assert!(homogeneous_density(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn one_dimensional_density_blows_up_toward_zero_mu() {
        let v: Vec<f64> = [-0.1, -0.01, -0.001].iter().map(|&m| homogeneous_density(1.0, m, 1).unwrap()).collect();
        assert!(v[1] / v[0] > 2.0 && v[2] / v[1] > 2.0);
    }

    #[test]
    fn field_resolvent_matches_closed_form() {
        for (lambda, sigma2) in [(1.0, 1.0), (0.5, 3.0), (2.0, 0.1), (1.0, 1e-6)] {
            let q = field_resolvent_integral(lambda, sigma2).unwrap();
            let exact = crate::special::gaussian_laplace(lambda, sigma2.sqrt());
            assert!((q - exact).abs() < 1e-10 * exact, "{lambda} {sigma2}");
            assert!(q < 1.0 / lambda);
        }
        assert_eq!(field_resolvent_integral(2.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn geometric_law_limits_and_monotonicity() {
        assert_eq!(geometric_resolvent(2.0, 1.0, 0.0).unwrap(), 0.5);
        let mut prev = f64::INFINITY;
        for mean in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let v = geometric_resolvent(1.0, 1.0, mean).unwrap();
            assert!(v > 0.0 && v <= 1.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn homogeneous_line_two_point_matches_momentum_sum() {
        let g = Grid1D::new(10.0, 512).unwrap();
        let f = bump(0.0, 2.0, &g).unwrap();
        let s = QuasifreeState::new(1.0, -0.5, ThermalCloud::Homogeneous { dimension: 1 }, None).unwrap();
        let v = s.two_point(&f, &f).unwrap();
        // independent estimate: midpoint sum over a fine momentum lattice
        let dp = 1e-3;
        let mut oracle = 0.0;
        let mut p = -12.0 + 0.5 * dp;
        while p < 12.0 {
            oracle += f.fourier_at(p).norm_sqr() * bose_occupation(1.0, p * p, -0.5) * dp;
            p += dp;
        }
        assert!((v.re - oracle).abs() < 1e-8 * oracle);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn radial_bump_transform_and_contour() {
        let f = RadialBump::with_integral(1.0, 1.0).unwrap();
        assert!((f.integral() - 1.0).abs() < 1e-12);
        // real axis and rotated ray agree for moderate t
        let a = radial_thermal_on_ray(1.0, 0.0, &f, &f, 3.0, 0.0).unwrap();
        let b = radial_thermal_correlation(1.0, 0.0, &f, &f, 3.0).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} {b}");
    }
}
