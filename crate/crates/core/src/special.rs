//! Scalar special functions shared by the solvers.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// `exp(-1/(1-u²))` for `|u| < 1`, zero otherwise.
pub fn bump_profile(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Bose occupation `1/(e^{β(ε-μ)} - 1)`; requires `ε > μ`.
pub fn bose_occupation(beta: f64, energy: f64, mu: f64) -> f64 {
    1.0 / libm::expm1(beta * (energy - mu))
}

/// Radial shape of the `l = 1` trap ground state, normalized to 1 at the origin:
/// `s(u) = 3(sin u - u cos u)/u³`.
pub fn l1_shape(u: f64) -> f64 {
    let a = u.abs();
    if a < 0.1 {
        let u2 = u * u;
        1.0 - u2 / 10.0 + u2 * u2 / 280.0 - u2 * u2 * u2 / 15120.0
    } else {
        3.0 * (a.sin() - a * a.cos()) / (a * a * a)
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        // asymptotic series; the first neglected term is below 1e-16 here
        let z = 1.0 / (2.0 * x * x);
        let series = 1.0 - z + 3.0 * z * z - 15.0 * z * z * z + 105.0 * z * z * z * z;
        series / (x * PI.sqrt())
    }
}

/// `∫₀^∞ e^{-λu - σ²u²/2} du` in closed form.
pub fn gaussian_laplace(lambda: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0 / lambda;
    }
    let x = lambda / (sigma * core::f64::consts::SQRT_2);
    (PI / 2.0).sqrt() / sigma * erfcx(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_compact_and_peaks_at_origin() {
        assert_eq!(bump_profile(1.0), 0.0);
        assert_eq!(bump_profile(-1.5), 0.0);
        assert!((bump_profile(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(bump_profile(0.3), bump_profile(-0.3));
    }

    #[test]
    fn l1_shape_series_matches_closed_form_at_switch() {
        let u = 0.1;
        let closed = 3.0 * (u.sin() - u * u.cos()) / (u * u * u);
        assert!((l1_shape(0.0999999999) - closed).abs() < 1e-11);
        assert_eq!(l1_shape(0.0), 1.0);
        // first zero of j1 at 4.4934...
        assert!(l1_shape(4.493409457909064).abs() < 1e-14);
    }

    #[test]
    fn occupation_is_stable_near_mu() {
        let n = bose_occupation(1.0, 1e-12, 0.0);
        assert!((n * 1e-12 - 1.0).abs() < 1e-6);
        assert!((bose_occupation(2.0, 1.0, 0.5) - 1.0 / (1.0f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn erfcx_is_continuous_across_branches() {
        let a = (24.999999f64 * 24.999999).exp() * libm::erfc(24.999999);
        assert!((erfcx(25.0) - a).abs() < 1e-7 * a);
        assert!((erfcx(0.0) - 1.0).abs() < 1e-16);
    }
}
