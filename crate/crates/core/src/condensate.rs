//! Condensate modes of large traps: renormalized 1D ground and first excited
//! states, their pairings with test functions, condensate particle counts, and
//! the 3D `l = 1` profile.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::grid::{inner, Grid1D, RadialGrid, WaveFunction};
use crate::hamiltonian::{assemble, ground_pair, parity_of, radial_assemble, Parity, PotentialSpec};
use crate::quadrature::gauss_legendre_on;
use crate::special::{bump_profile, l1_shape};

/// Rescale an eigenfunction so that an even mode equals 1 at the origin and an
/// odd mode has unit slope there (centered difference). The result is
/// projected onto its parity so that reflection symmetry holds to rounding.
pub fn mode_renormalize(psi: &WaveFunction, parity: Parity) -> Result<WaveFunction> {
    if parity_of(psi) != Some(parity) {
        return Err(Error::usage(alloc::format!("mode is not {}", parity.as_str())));
    }
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let mirrored = psi.reflected();
    let values = psi.values().iter().zip(mirrored.values()).map(|(a, b)| (a + b * sign) * 0.5).collect();
    let psi = &WaveFunction::new(*psi.grid(), values)?;
    let grid = psi.grid();
    let o = grid.origin();
    let scale = match parity {
        Parity::Even => psi.at(o),
        Parity::Odd => (psi.at(o + 1) - psi.at(o - 1)) / (2.0 * grid.dx()),
    };
    if scale.norm() == 0.0 {
        return Err(Error::domain("mode vanishes at the origin"));
    }
    Ok(psi.clone().scaled_complex(scale.inv()))
}

/// The `index`-th trap mode renormalized, with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapMode {
    pub radius: f64,
    pub energy: f64,
    pub mode: WaveFunction,
    pub edge_amplitude: f64,
}

/// Lowest even (`Parity::Even`) or odd mode of `c²(x² - R²)₊` on `grid`.
pub fn trap_mode(grid: &Grid1D, radius: f64, coupling: f64, parity: Parity) -> Result<TrapMode> {
    let h = assemble(grid, &PotentialSpec::truncated_harmonic(radius, coupling))?;
    let d = h.lowest(2)?;
    let (even, odd) = ground_pair(&d)?;
    let (chosen, index) = match parity {
        Parity::Even => (even, 0),
        Parity::Odd => (odd, 1),
    };
    if chosen.parity != Some(parity) {
        return Err(Error::domain(alloc::format!("mode {index} is not {}", parity.as_str())));
    }
    Ok(TrapMode {
        radius,
        energy: chosen.energy,
        mode: mode_renormalize(&chosen.wavefunction, parity)?,
        edge_amplitude: d.edge_amplitude(index),
    })
}

/// `∫ f` (even) or `∫ x f` (odd): the pairing of the zero-energy limit mode.
pub fn limit_pairing(parity: Parity, f: &WaveFunction) -> Complex64 {
    match parity {
        Parity::Even => f.integral(),
        Parity::Odd => f.first_moment(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsRow {
    pub radius: f64,
    pub energy: f64,
    pub pairing: f64,
    pub limit: f64,
    pub deviation: f64,
}

/// R-scan of smeared trap modes against their limit pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAsymptotics {
    pub parity: Parity,
    pub rows: Vec<AsymptoticsRow>,
    /// Log–log slope of the deviations, when at least two exceed `1e-14`.
    pub slope: Option<f64>,
}

/// Pair the renormalized trap mode with `f` for each radius; `f_on(grid)`
/// samples the test function, `grid_for(R)` picks the grid.
pub fn smeared_mode_limit(
    parity: Parity,
    coupling: f64,
    radii: &[f64],
    grid_for: impl Fn(f64) -> Result<Grid1D>,
    f_on: impl Fn(&Grid1D) -> Result<WaveFunction>,
) -> Result<ModeAsymptotics> {
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let grid = grid_for(r)?;
        let f = f_on(&grid)?;
        if let Some((lo, hi)) = f.support_indices() {
            if grid.x(lo).abs().max(grid.x(hi).abs()) > 0.5 * r {
                return Err(Error::config(alloc::format!("test function leaves |x| ≤ R/2 for R = {r}")));
            }
        }
        let m = trap_mode(&grid, r, coupling, parity)?;
        let pairing = inner(&m.mode, &f)?.re;
        let limit = limit_pairing(parity, &f).re;
        rows.push(AsymptoticsRow { radius: r, energy: m.energy, pairing, limit, deviation: (pairing - limit).abs() });
    }
    let usable: Vec<&AsymptoticsRow> = rows.iter().filter(|r| r.deviation > 1e-14).collect();
    let slope = if usable.len() >= 2 {
        let xs: Vec<f64> = usable.iter().map(|r| r.radius).collect();
        let ys: Vec<f64> = usable.iter().map(|r| r.deviation).collect();
        Some(loglog_fit(&xs, &ys).0)
    } else {
        None
    };
    Ok(ModeAsymptotics { parity, rows, slope })
}

/// Condensate particles in `[-R, R]`: `κ² ∫ cos²(√ε x) dx` (even) or
/// `κ² ∫ sin²(√ε x)/ε dx` (odd), in closed form.
pub fn condensate_count(parity: Parity, kappa: f64, radius: f64, energy: f64) -> f64 {
    let k = energy.sqrt();
    let k2 = kappa * kappa;
    let osc = (2.0 * k * radius).sin() / (2.0 * k);
    match parity {
        Parity::Even => k2 * (radius + osc),
        Parity::Odd => k2 * (radius - osc) / energy,
    }
}

/// Fitted exponent of condensate counts against radius.
pub fn count_exponent(radii: &[f64], counts: &[f64]) -> Option<f64> {
    if counts.iter().all(|c| *c == 0.0) {
        return None;
    }
    Some(loglog_fit(radii, counts).0)
}

/// Lowest `l = 1` radial mode of a trap: `k_R = √ε` and the wall amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Mode {
    pub wavenumber: f64,
    pub edge_amplitude: f64,
}

/// Lowest `l = 1` radial mode of `c²(r² - R²)₊` on a radial grid reaching
/// `r_max` with spacing at most `dr`.
pub fn l1_wavenumber(radius: f64, coupling: f64, r_max: f64, dr: f64) -> Result<L1Mode> {
    if !(r_max > radius) {
        return Err(Error::config("radial box must extend beyond the trap radius"));
    }
    let grid = RadialGrid::with_spacing(r_max, dr)?;
    let h = radial_assemble(&grid, 1, &PotentialSpec::truncated_harmonic(radius, coupling))?;
    let d = h.lowest(1)?;
    Ok(L1Mode { wavenumber: d.eigenvalue(0).sqrt(), edge_amplitude: d.edge_amplitude(0) })
}

/// `h(x) = z s(k|x|)` with the shape normalized to `s(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub k: f64,
}

impl RadialProfile {
    pub fn value(&self, x: [f64; 3]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        x[2] * l1_shape(self.k * r)
    }
}

/// Bump `A exp(-1/(1-ρ²/a²))` centered on the z-axis at height `z0`, scaled
/// to unit integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialBump {
    pub z0: f64,
    pub radius: f64,
}

const NODES: usize = 48;

impl AxialBump {
    /// `∫ w(x) f(x) d³x` for an integrand `w(ρ, cos θ)` written in spherical
    /// coordinates about the bump center, normalized by `∫ f`.
    fn average(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        let (rho, wr) = gauss_legendre_on(NODES, 0.0, self.radius);
        let (ct, wc) = gauss_legendre_on(NODES, -1.0, 1.0);
        let mut num = 0.0;
        let mut den = 0.0;
        for (r, a) in rho.iter().zip(&wr) {
            let radial = a * r * r * bump_profile(r / self.radius);
            for (c, b) in ct.iter().zip(&wc) {
                num += radial * b * w(*r, *c);
                den += radial * b;
            }
        }
        num / den
    }

    /// `∫ z f` (equal to `z0` for a unit-integral bump).
    pub fn limit_pairing(&self) -> f64 {
        self.average(|r, c| self.z0 + r * c)
    }

    /// `∫ h f` for the profile `h`.
    pub fn pairing(&self, profile: &RadialProfile) -> f64 {
        self.average(|r, c| {
            let z = self.z0 + r * c;
            let s = r * (1.0 - c * c).max(0.0).sqrt();
            profile.value([s, 0.0, z])
        })
    }

    /// `|∫ z (s(k|x|) - 1) f|`, evaluated without cancellation.
    pub fn deviation(&self, profile: &RadialProfile) -> f64 {
        self.average(|r, c| {
            let z = self.z0 + r * c;
            let d2 = r * r + self.z0 * self.z0 + 2.0 * r * self.z0 * c;
            z * (l1_shape(profile.k * d2.max(0.0).sqrt()) - 1.0)
        })
        .abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Row {
    pub radius: f64,
    pub k: f64,
    /// `sup |h - z| R²/(|z||x|²)` over the evaluation set.
    pub bound_constant: f64,
    pub pairing: f64,
    pub limit: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Report {
    pub rows: Vec<L1Row>,
    /// Largest over smallest bound constant.
    pub constant_spread: f64,
    pub deviation_slope: Option<f64>,
}

/// Evaluation points: 16 radii log-spaced from `R·1e-3` to `R`, along the
/// z-axis and along the oblique direction `(1, 0, 1)/√2`.
pub fn evaluation_points(radius: f64) -> Vec<[f64; 3]> {
    let mut pts = Vec::with_capacity(32);
    let h = core::f64::consts::FRAC_1_SQRT_2;
    for i in 0..16 {
        let r = radius * 10f64.powf(-3.0 + 3.0 * i as f64 / 15.0);
        pts.push([0.0, 0.0, r]);
        pts.push([h * r, 0.0, h * r]);
    }
    pts
}

/// Bound constant of the deviation estimate for one profile.
pub fn bound_constant(profile: &RadialProfile, radius: f64, points: &[[f64; 3]]) -> Result<f64> {
    let mut sup = 0.0f64;
    for x in points {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if r2.sqrt() > radius * (1.0 + 1e-12) {
            return Err(Error::config("evaluation point outside |x| ≤ R"));
        }
        if x[2] == 0.0 {
            continue;
        }
        let dev = (l1_shape(profile.k * r2.sqrt()) - 1.0).abs();
        sup = sup.max(dev * radius * radius / r2);
    }
    Ok(sup)
}

/// Check the `l = 1` profile for each `(R, k_R)` pair.
pub fn l1_profile_check(entries: &[(f64, f64)], f: &AxialBump) -> Result<L1Report> {
    let mut rows = Vec::with_capacity(entries.len());
    for &(radius, k) in entries {
        let profile = RadialProfile { k };
        let bound = bound_constant(&profile, radius, &evaluation_points(radius))?;
        rows.push(L1Row {
            radius,
            k,
            bound_constant: bound,
            pairing: f.pairing(&profile),
            limit: f.limit_pairing(),
            deviation: f.deviation(&profile),
        });
    }
    let max = rows.iter().map(|r| r.bound_constant).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.bound_constant).fold(f64::INFINITY, f64::min);
    let usable: Vec<&L1Row> = rows.iter().filter(|r| r.deviation > 1e-14).collect();
    let deviation_slope = if usable.len() >= 2 {
        let xs: Vec<f64> = usable.iter().map(|r| r.radius).collect();
        let ys: Vec<f64> = usable.iter().map(|r| r.deviation).collect();
        Some(loglog_fit(&xs, &ys).0)
    } else {
        None
    };
    Ok(L1Report { rows, constant_spread: max / min, deviation_slope })
}
