//! Time evolution under the trapped Hamiltonian `H_R` (spectral sum) and the
//! free Hamiltonian `H_∞` (Fourier multiplier), and the gap between them.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fit::DecayReport;
use crate::grid::{to_momentum, to_position, BumpSpec, Grid1D, WaveFunction};
use crate::hamiltonian::{assemble, PotentialSpec, SpectralDecomposition};
use crate::quadrature;

/// Symbol of the free Hamiltonian used by [`evolve_free_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// `4 sin²(p dx/2)/dx²`, the symbol of the three-point Laplacian. Free and
    /// trapped evolutions then share their discretization, so their difference
    /// is the effect of the trap alone.
    #[default]
    Lattice,
    /// The continuum symbol `p²`.
    Continuum,
}

impl Dispersion {
    pub fn omega(&self, p: f64, dx: f64) -> f64 {
        match self {
            Dispersion::Lattice => {
                let s = (0.5 * p * dx).sin();
                4.0 * s * s / (dx * dx)
            }
            Dispersion::Continuum => p * p,
        }
    }
}

/// `Σ_k e^{-itε_k} ⟨ψ_k, f⟩ ψ_k`; needs a complete decomposition.
pub fn evolve_spectral(decomposition: &SpectralDecomposition, f: &WaveFunction, t: f64) -> Result<WaveFunction> {
    if !decomposition.is_complete() {
        return Err(Error::usage("spectral evolution needs every eigenpair"));
    }
    let coefficients = decomposition.coefficients(f)?;
    evolve_coefficients(decomposition, &coefficients, t)
}

fn evolve_coefficients(decomposition: &SpectralDecomposition, coefficients: &[Complex64], t: f64) -> Result<WaveFunction> {
    let phased: Vec<Complex64> = coefficients
        .iter()
        .zip(decomposition.eigenvalues())
        .map(|(c, e)| c * Complex64::new(0.0, -t * e).exp())
        .collect();
    decomposition.synthesize(&phased)
}

/// `e^{-itH_∞} f` with the lattice dispersion.
pub fn evolve_free(f: &WaveFunction, t: f64) -> WaveFunction {
    evolve_free_with(f, t, Dispersion::Lattice)
}

/// Multiply `f̂(p)` by `e^{-itω(p)}` and transform back.
pub fn evolve_free_with(f: &WaveFunction, t: f64, dispersion: Dispersion) -> WaveFunction {
    if t == 0.0 {
        return f.clone();
    }
    let dx = f.grid().dx();
    let fhat = to_momentum(f).map_with_momentum(|p| Complex64::new(0.0, -t * dispersion.omega(p, dx)).exp());
    to_position(&fhat)
}

/// `(∫_{|x|≥R} |f|² dx)^{1/2}`.
pub fn exterior_norm(f: &WaveFunction, radius: f64) -> f64 {
    let g = f.grid();
    (g.points()
        .zip(f.values())
        .filter(|(x, _)| x.abs() >= radius)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        * g.dx())
    .sqrt()
}

/// Box-size rule `L ≥ R + base + velocity_factor·|t|·p_max`, where `p_max` is
/// the `quantile` momentum quantile of `|f̂|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginRule {
    pub base: f64,
    pub velocity_factor: f64,
    pub quantile: f64,
}

impl Default for MarginRule {
    fn default() -> Self {
        Self { base: 16.0, velocity_factor: 4.0, quantile: 0.99999 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginCheck {
    pub required: f64,
    pub half_width: f64,
    pub p_max: f64,
}

impl MarginCheck {
    pub fn passed(&self) -> bool {
        self.half_width >= self.required
    }
}

impl MarginRule {
    pub fn check(&self, f: &WaveFunction, t: f64, radius: f64) -> MarginCheck {
        let p_max = to_momentum(f).momentum_quantile(self.quantile);
        MarginCheck {
            required: radius + self.base + self.velocity_factor * t.abs() * p_max,
            half_width: f.grid().half_width(),
            p_max,
        }
    }

    pub fn enforce(&self, f: &WaveFunction, t: f64, radius: f64) -> Result<MarginCheck> {
        let check = self.check(f, t, radius);
        if check.passed() {
            Ok(check)
        } else {
            Err(Error::gate(alloc::format!(
                "box half width {} is below the required {:.3} (p_max = {:.3})",
                check.half_width,
                check.required,
                check.p_max
            )))
        }
    }
}

/// Trap coupling as a function of the trap radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Constant(f64),
    /// `scale · R^exponent`, exponent at most 2.
    Power { scale: f64, exponent: f64 },
}

impl Coupling {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        if !(exponent <= 2.0) {
            return Err(Error::config(alloc::format!("coupling exponent must be at most 2, got {exponent}")));
        }
        Ok(Coupling::Power { scale, exponent })
    }

    pub fn at(&self, radius: f64) -> f64 {
        match *self {
            Coupling::Constant(c) => c,
            Coupling::Power { scale, exponent } => scale * radius.powf(exponent),
        }
    }
}

/// Reusable measurement of `‖(e^{-itH_R} - e^{-itH_∞}) f‖` for one `(f, R, c)`.
#[derive(Debug, Clone)]
pub struct GapProbe {
    f: WaveFunction,
    radius: f64,
    coupling: f64,
    decomposition: SpectralDecomposition,
    coefficients: Vec<Complex64>,
}

impl GapProbe {
    pub fn new(f: &WaveFunction, radius: f64, coupling: f64) -> Result<Self> {
        let h = assemble(f.grid(), &PotentialSpec::truncated_harmonic(radius, coupling))?;
        let decomposition = h.diagonalize()?;
        let coefficients = decomposition.coefficients(f)?;
        Ok(Self { f: f.clone(), radius, coupling, decomposition, coefficients })
    }

    pub fn function(&self) -> &WaveFunction {
        &self.f
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn evolve_trapped(&self, t: f64) -> Result<WaveFunction> {
        evolve_coefficients(&self.decomposition, &self.coefficients, t)
    }

    pub fn gap(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let trapped = self.evolve_trapped(t)?;
        Ok(trapped.sub(&evolve_free(&self.f, t))?.norm())
    }

    /// `∫₀^{|t|} c² ‖(x² - R²)₊ e^{-iuH_∞} f‖ du` by composite Simpson, doubling
    /// from 32 intervals until the relative change drops below `1e-6`.
    pub fn duhamel_bound(&self, t: f64) -> Result<f64> {
        duhamel_integral(&self.f, t, self.radius, self.coupling)
    }
}

fn duhamel_integral(f: &WaveFunction, t: f64, radius: f64, coupling: f64) -> Result<f64> {
    if t == 0.0 || coupling == 0.0 {
        return Ok(0.0);
    }
    let c2 = coupling * coupling;
    let grid = *f.grid();
    let weights: Vec<f64> = grid.points().map(|x| (x * x - radius * radius).max(0.0)).collect();
    let integrand = |u: f64| {
        let g = evolve_free(f, u);
        let s: f64 = g.values().iter().zip(&weights).map(|(v, w)| w * w * v.norm_sqr()).sum();
        c2 * (s * grid.dx()).sqrt()
    };
    let (value, _) = quadrature::simpson_converged(integrand, 0.0, t.abs(), 32, 1e-6, 1 << 14)?;
    Ok(value)
}

/// Gap on `f`'s grid, subject to the default margin rule.
pub fn propagator_gap(f: &WaveFunction, t: f64, radius: f64, coupling: f64) -> Result<f64> {
    MarginRule::default().enforce(f, t, radius)?;
    GapProbe::new(f, radius, coupling)?.gap(t)
}

/// Duhamel upper bound on [`propagator_gap`], subject to the default margin rule.
pub fn duhamel_bound(f: &WaveFunction, t: f64, radius: f64, coupling: f64) -> Result<f64> {
    MarginRule::default().enforce(f, t, radius)?;
    duhamel_integral(f, t, radius, coupling)
}

/// `2 n λ^{-2} ‖f‖ · gap`.
pub fn observable_gap_bound(n: u32, lambda: f64, f: &WaveFunction, t: f64, radius: f64, coupling: f64) -> Result<f64> {
    if n == 0 || !(lambda > 0.0) {
        return Err(Error::config("need n ≥ 1 and λ > 0"));
    }
    let gap = propagator_gap(f, t, radius, coupling)?;
    Ok(observable_bound_from_gap(n, lambda, f.norm(), gap))
}

pub fn observable_bound_from_gap(n: u32, lambda: f64, f_norm: f64, gap: f64) -> f64 {
    2.0 * n as f64 / (lambda * lambda) * f_norm * gap
}

/// Gaps of a bump at time `t` over ascending radii, each on the grid chosen by
/// `grid_for(R)`, judged for faster-than-polynomial decay.
pub fn gap_decay_scan(
    bump: BumpSpec,
    t: f64,
    radii: &[f64],
    coupling: Coupling,
    grid_for: impl Fn(f64) -> Result<Grid1D>,
) -> Result<DecayReport> {
    if radii.len() < 4 {
        return Err(Error::config("a decay scan needs at least 4 radii"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("radii must be strictly ascending"));
    }
    let mut gaps = Vec::with_capacity(radii.len());
    for &r in radii {
        let f = bump.sample(&grid_for(r)?)?;
        gaps.push(if t == 0.0 { 0.0 } else { GapProbe::new(&f, r, coupling.at(r))?.gap(t)? });
    }
    Ok(DecayReport::analyze(radii, &gaps, DecayReport::DEFAULT_FLOOR, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::Verdict;
    use crate::grid::bump;
    use crate::hamiltonian::assemble;

    fn packet(l: f64, n: usize) -> WaveFunction {
        bump(0.0, 2.0, &Grid1D::new(l, n).unwrap()).unwrap()
    }

    #[test]
    fn spectral_evolution_is_unitary_and_exact_on_eigenvectors() {
        let g = Grid1D::new(8.0, 256).unwrap();
        let h = assemble(&g, &PotentialSpec::truncated_harmonic(2.0, 1.0)).unwrap();
        let d = h.diagonalize().unwrap();
        let f = bump(1.0, 2.0, &g).unwrap();
        assert!(evolve_spectral(&d, &f, 0.0).unwrap().sub(&f).unwrap().norm() < 1e-12);
        let out = evolve_spectral(&d, &f, 0.7).unwrap();
        assert!((out.norm() - f.norm()).abs() < 1e-10);
        let psi = d.wavefunction(3).unwrap();
        let expected = psi.clone().scaled_complex(Complex64::new(0.0, -0.7 * d.eigenvalue(3)).exp());
        assert!(evolve_spectral(&d, &psi, 0.7).unwrap().sub(&expected).unwrap().norm() < 1e-9);
    }

    #[test]
    fn free_evolution_agrees_with_free_spectral_sum() {
        let f = packet(40.0, 1024);
        let d = assemble(f.grid(), &PotentialSpec::Free).unwrap().diagonalize().unwrap();
        let a = evolve_spectral(&d, &f, 1.0).unwrap();
        let b = evolve_free(&f, 1.0);
        assert!((b.norm() - 1.0).abs() < 1e-10);
        assert!(a.sub(&b).unwrap().norm() <= 1e-6);
    }

    #[test]
    fn continuum_dispersion_is_unitary() {
        let f = packet(20.0, 512);
        let g = evolve_free_with(&f, 0.5, Dispersion::Continuum);
        assert!((g.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn trivial_gaps() {
        let f = packet(40.0, 1024);
        let probe = GapProbe::new(&f, 6.0, 1.0).unwrap();
        assert!(probe.gap(0.0).unwrap() < 1e-12);
        assert_eq!(probe.duhamel_bound(0.0).unwrap(), 0.0);
        let free = GapProbe::new(&f, 6.0, 0.0).unwrap();
        assert!(free.gap(1.0).unwrap() <= 1e-8);
        assert_eq!(free.duhamel_bound(1.0).unwrap(), 0.0);
    }

    #[test]
    fn duhamel_dominates_gap() {
        let f = packet(40.0, 2048);
        let probe = GapProbe::new(&f, 8.0, 1.0).unwrap();
        let gap = probe.gap(1.0).unwrap();
        let bound = probe.duhamel_bound(1.0).unwrap();
        assert!(gap > 0.0 && bound >= gap - 1e-8, "gap {gap} bound {bound}");
    }

    #[test]
    fn margin_rule_gates_small_boxes() {
        let f = packet(12.0, 512);
        assert!(propagator_gap(&f, 1.0, 6.0, 1.0).is_err());
        let rule = MarginRule::default();
        let check = rule.check(&f, 0.0, 6.0);
        assert!(!check.passed());
        assert!((check.required - 22.0).abs() < 1e-12);
    }

    #[test]
    fn observable_bound_is_linear_in_n() {
        let a = observable_bound_from_gap(1, 1.0, 1.0, 0.3);
        let b = observable_bound_from_gap(2, 1.0, 1.0, 0.3);
        assert_eq!(b, 2.0 * a);
        assert_eq!(observable_bound_from_gap(3, 2.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn scan_input_validation_and_trivial_time() {
        let b = BumpSpec::new(0.0, 2.0);
        let grid = |r: f64| Grid1D::new(2.0 * r + 16.0, 512);
        assert!(gap_decay_scan(b, 1.0, &[6.0, 8.0, 10.0], Coupling::Constant(1.0), grid).is_err());
        assert!(Coupling::power(1.0, 3.0).is_err());
        let r = gap_decay_scan(b, 0.0, &[6.0, 8.0, 10.0, 12.0], Coupling::Constant(1.0), grid).unwrap();
        assert_eq!(r.verdict, Verdict::Trivial);
    }
}
