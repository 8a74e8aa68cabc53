//! Uniform spatial grids, sampled wave functions and the momentum transform.
//!
//! Offset convention for [`Grid1D`]: `x_j = (j - n/2)·dx` for `j = 0..n`, so
//! `x_0 = -L`, `x_{n/2} = 0` and the last sample sits at `L - dx`. Reflection
//! `x → -x` maps index `j` to `n - j` (index 0 is its own partner because `±L`
//! coincide on the periodic box). Writing the samples this way makes
//! `x_{n-j} = -x_j` hold bit-exactly.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{self, Direction};
use crate::special::bump_profile;

/// Uniform grid on the box `[-L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    n_points: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 16;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::config(alloc::format!("half width must be positive, got {half_width}")));
        }
        if n_points < Self::MIN_POINTS || !n_points.is_multiple_of(2) {
            return Err(Error::config(alloc::format!(
                "n_points must be even and at least {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { half_width, n_points })
    }

    /// Grid on `[-L, L)` whose spacing is at most `max_spacing`.
    pub fn with_spacing(half_width: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(Error::config("spacing must be positive"));
        }
        let mut n = (2.0 * half_width / max_spacing).ceil() as usize;
        n += n % 2;
        Self::new(half_width, n.max(Self::MIN_POINTS))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    /// Index of the sample at the origin.
    pub fn origin(&self) -> usize {
        self.n_points / 2
    }

    /// Index of the grid point `x → -x`.
    pub fn reflect_index(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.n_points - j
        }
    }

    /// Index of the sample nearest to `x`, or `None` outside the box.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let s = x / self.dx() + (self.n_points / 2) as f64;
        let j = s.round();
        if j < 0.0 || j >= self.n_points as f64 {
            None
        } else {
            Some(j as usize)
        }
    }

    /// Momentum samples `p_k = π k / L` for `k ∈ [-n/2, n/2)`, ascending.
    pub fn momenta(&self) -> Vec<f64> {
        let half = (self.n_points / 2) as i64;
        (-half..half).map(|k| PI * k as f64 / self.half_width).collect()
    }

    pub fn dp(&self) -> f64 {
        PI / self.half_width
    }
}

/// Radial grid `r_j = j·dr`, `j = 1..=n`, origin excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::config(alloc::format!("r_max must be positive, got {r_max}")));
        }
        if n_points < 4 {
            return Err(Error::config("radial grid needs at least 4 points"));
        }
        Ok(Self { r_max, n_points })
    }

    pub fn with_spacing(r_max: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(Error::config("spacing must be positive"));
        }
        Self::new(r_max, (r_max / max_spacing).ceil() as usize)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    /// `r_j` for `j = 1..=n`.
    pub fn r(&self, j: usize) -> f64 {
        j as f64 * self.dr()
    }
}

/// Compactly supported smooth bump `exp(-1/(1-u²))`, `u = (x - center)/radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub center: f64,
    pub radius: f64,
}

impl BumpSpec {
    pub fn new(center: f64, radius: f64) -> Self {
        Self { center, radius }
    }

    /// L²-normalized samples on `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Result<WaveFunction> {
        bump(self.center, self.radius, grid)
    }
}

/// L²-normalized bump on `grid`; zero exactly for `|x - center| ≥ radius`.
pub fn bump(center: f64, radius: f64, grid: &Grid1D) -> Result<WaveFunction> {
    if !(radius > 0.0) {
        return Err(Error::config(alloc::format!("bump radius must be positive, got {radius}")));
    }
    let l = grid.half_width();
    if center - radius < -l || center + radius > l {
        return Err(Error::config(alloc::format!(
            "bump support [{}, {}] exceeds the box [-{l}, {l}]",
            center - radius,
            center + radius
        )));
    }
    let raw = WaveFunction::from_fn(*grid, |x| Complex64::new(bump_profile((x - center) / radius), 0.0));
    let norm = raw.norm();
    if norm == 0.0 {
        return Err(Error::config("bump is not resolved by the grid"));
    }
    Ok(raw.scaled(1.0 / norm))
}

/// Complex samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::config("wave function samples must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, j: usize) -> Complex64 {
        self.values[j]
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }

    pub fn scaled_complex(mut self, factor: Complex64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }

    fn check_grid(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("wave functions live on different grids".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &WaveFunction) -> Result<WaveFunction> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(WaveFunction { grid: self.grid, values })
    }

    pub fn add(&self, other: &WaveFunction) -> Result<WaveFunction> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(WaveFunction { grid: self.grid, values })
    }

    /// `f(-x)` on the same grid.
    pub fn reflected(&self) -> WaveFunction {
        let values = (0..self.grid.len()).map(|j| self.values[self.grid.reflect_index(j)]).collect();
        WaveFunction { grid: self.grid, values }
    }

    /// Translate by `shift` grid cells, periodically.
    pub fn shifted_cells(&self, shift: isize) -> WaveFunction {
        let n = self.grid.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j - shift).rem_euclid(n) as usize])
            .collect();
        WaveFunction { grid: self.grid, values }
    }

    /// `∫ f dx` as a Riemann sum.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.dx()
    }

    /// `∫ x f(x) dx` as a Riemann sum.
    pub fn first_moment(&self) -> Complex64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| v * self.grid.x(j))
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// Rescale so that `∫ f dx = 1`.
    pub fn with_unit_integral(self) -> Result<WaveFunction> {
        let total = self.integral();
        if total.norm() == 0.0 {
            return Err(Error::domain("function has zero integral"));
        }
        Ok(self.scaled_complex(total.inv()))
    }

    /// Continuous transform `(2π)^{-1/2} Σ_j f_j e^{-ipx_j} dx` at any momentum.
    pub fn fourier_at(&self, p: f64) -> Complex64 {
        let dx = self.grid.dx();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let phase = -p * self.grid.x(j);
            acc += v * Complex64::new(phase.cos(), phase.sin());
        }
        acc * (dx / (2.0 * PI).sqrt())
    }

    /// Smallest and largest grid index with a nonzero sample.
    pub fn support_indices(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| v.norm_sqr() > 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() > 0.0)?;
        Some((first, last))
    }
}

/// `⟨f, g⟩ = Σ conj(f_j) g_j dx`, conjugate-linear in `f`.
pub fn inner(f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
    f.check_grid(g)?;
    let s: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(s * f.grid.dx())
}

/// Momentum-space samples, ascending `p_k = πk/L`, `k ∈ [-n/2, n/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl MomentumFunction {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.grid.momenta()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dp(&self) -> f64 {
        self.grid.dp()
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dp()).sqrt()
    }

    /// Multiply every sample by `phase(p)`.
    pub fn map_with_momentum(mut self, phase: impl Fn(f64) -> Complex64) -> Self {
        let momenta = self.grid.momenta();
        for (v, p) in self.values.iter_mut().zip(momenta) {
            *v *= phase(p);
        }
        self
    }

    /// Smallest `|p|` such that the `|f̂|²` mass with momentum magnitude at most
    /// `|p|` reaches `fraction` of the total.
    pub fn momentum_quantile(&self, fraction: f64) -> f64 {
        let momenta = self.grid.momenta();
        let mut pairs: Vec<(f64, f64)> = momenta
            .iter()
            .zip(&self.values)
            .map(|(p, v)| (p.abs(), v.norm_sqr()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (p, w) in &pairs {
            acc += w;
            if acc >= fraction * total {
                return *p;
            }
        }
        pairs.last().map(|p| p.0).unwrap_or(0.0)
    }
}

/// Map FFT bin `m` to the signed wave number `k ∈ [-n/2, n/2)`.
fn bin_to_k(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// `f̂(p_k) = (2π)^{-1/2} Σ_j f_j e^{-i p_k x_j} dx`.
pub fn to_momentum(f: &WaveFunction) -> MomentumFunction {
    let grid = *f.grid();
    let n = grid.len();
    let mut data = f.values.clone();
    fft::transform(&mut data, Direction::Forward);
    let scale = grid.dx() / (2.0 * PI).sqrt();
    // x_0 = -L contributes the factor e^{iπk} = (-1)^k
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (m, v) in data.into_iter().enumerate() {
        let k = bin_to_k(m, n);
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        values[(k + (n / 2) as i64) as usize] = v * (scale * sign);
    }
    MomentumFunction { grid, values }
}

/// Inverse of [`to_momentum`].
pub fn to_position(fhat: &MomentumFunction) -> WaveFunction {
    let grid = fhat.grid;
    let n = grid.len();
    let mut data = alloc::vec![Complex64::new(0.0, 0.0); n];
    let scale = (2.0 * PI).sqrt() / (grid.dx() * n as f64);
    for (m, slot) in data.iter_mut().enumerate() {
        let k = bin_to_k(m, n);
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        *slot = fhat.values[(k + (n / 2) as i64) as usize] * (scale * sign);
    }
    fft::transform(&mut data, Direction::Backward);
    WaveFunction { grid, values: data }
}
