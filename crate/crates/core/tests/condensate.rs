use std::f64::consts::PI;

use thermolim_core::condensate::{
    bound_constant, condensate_count, count_exponent, evaluation_points, l1_profile_check, l1_wavenumber,
    mode_renormalize, smeared_mode_limit, trap_mode, AxialBump, RadialProfile,
};
use thermolim_core::fit::loglog_fit;
use thermolim_core::grid::{bump, Grid1D};
use thermolim_core::hamiltonian::{assemble, Parity, PotentialSpec};
use thermolim_core::quadrature::integrate;
use thermolim_core::special::{bump_profile, l1_shape};

const RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

fn trap_grid(r: f64) -> thermolim_core::Result<Grid1D> {
    Grid1D::with_spacing(2.0 * r + 16.0, 0.05)
}

#[test]
fn renormalized_modes_match_interior_solutions() {
    let r = 40.0;
    let g = trap_grid(r).unwrap();
    let even = trap_mode(&g, r, 1.0, Parity::Even).unwrap();
    let odd = trap_mode(&g, r, 1.0, Parity::Odd).unwrap();
    assert!(even.edge_amplitude < 1e-8 && odd.edge_amplitude < 1e-8);
    let (ke, ko) = (even.energy.sqrt(), odd.energy.sqrt());
    let mut worst = (0.0f64, 0.0f64);
    for (j, x) in g.points().enumerate().filter(|(_, x)| x.abs() <= r / 2.0) {
        worst.0 = worst.0.max((even.mode.at(j).re - (ke * x).cos()).abs());
        worst.1 = worst.1.max((odd.mode.at(j).re - (ko * x).sin() / ko).abs());
    }
    assert!(worst.0 <= 1e-3, "even {}", worst.0);
    assert!(worst.1 <= 1e-3 * r, "odd {}", worst.1);
    assert!((even.mode.at(g.origin()).re - 1.0).abs() < 1e-6);
    let slope = (odd.mode.at(g.origin() + 1) - odd.mode.at(g.origin() - 1)).re / (2.0 * g.dx());
    assert!((slope - 1.0).abs() < 1e-4);

    let rescaled = mode_renormalize(&even.mode.clone().scaled(7.0), Parity::Even).unwrap();
    assert!(rescaled.sub(&even.mode).unwrap().norm() <= 1e-14 * even.mode.norm());
}

#[test]
fn low_energies_scale_as_inverse_square() {
    let mut e0 = Vec::new();
    let mut e1 = Vec::new();
    for &r in &RADII {
        let d = assemble(&trap_grid(r).unwrap(), &PotentialSpec::truncated_harmonic(r, 1.0)).unwrap().lowest(2).unwrap();
        assert!(d.eigenvalue(0) >= -1e-9);
        // hard walls at ±R dominate the truncated potential
        assert!(d.eigenvalue(0) * r * r <= PI * PI / 4.0);
        e0.push(d.eigenvalue(0));
        e1.push(d.eigenvalue(1));
    }
    assert!(e0.windows(2).all(|w| w[1] < w[0]) && e1.windows(2).all(|w| w[1] < w[0]));
    for e in [&e0, &e1] {
        let (slope, _) = loglog_fit(&RADII, e);
        assert!((slope + 2.0).abs() <= 0.15, "slope {slope}");
    }
}

#[test]
fn even_pairings_approach_the_integral() {
    let scan = smeared_mode_limit(Parity::Even, 1.0, &RADII, trap_grid, |g| {
        bump(0.0, 1.0, g)?.with_unit_integral()
    })
    .unwrap();
    for row in &scan.rows {
        assert!((row.limit - 1.0).abs() < 1e-12);
    }
    let slope = scan.slope.unwrap();
    assert!(slope <= -1.7 && (slope + 2.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn odd_pairings_approach_the_first_moment() {
    let symmetric = smeared_mode_limit(Parity::Odd, 1.0, &RADII, trap_grid, |g| bump(0.0, 1.0, g)).unwrap();
    assert!(symmetric.rows.iter().all(|r| r.pairing.abs() < 1e-12 && r.limit.abs() < 1e-12));

    let num = integrate(|x| x * bump_profile(x - 3.0), 2.0, 4.0, 1e-13).unwrap().value;
    let den = integrate(|x| bump_profile(x - 3.0), 2.0, 4.0, 1e-13).unwrap().value;
    let shifted = smeared_mode_limit(Parity::Odd, 1.0, &RADII, trap_grid, |g| bump(3.0, 1.0, g)?.with_unit_integral())
        .unwrap();
    for row in &shifted.rows {
        assert!((row.limit - num / den).abs() < 1e-8);
    }
    let slope = shifted.slope.unwrap();
    assert!(slope <= -1.7, "slope {slope}");

    let too_close = smeared_mode_limit(Parity::Odd, 1.0, &[6.0, 10.0], trap_grid, |g| bump(3.0, 1.0, g));
    assert!(too_close.is_err());
}

#[test]
fn condensate_counts_scale_with_parity() {
    let energies: Vec<(f64, f64)> = RADII
        .iter()
        .map(|&r| {
            let g = trap_grid(r).unwrap();
            (trap_mode(&g, r, 1.0, Parity::Even).unwrap().energy, trap_mode(&g, r, 1.0, Parity::Odd).unwrap().energy)
        })
        .collect();
    let even: Vec<f64> = RADII.iter().zip(&energies).map(|(&r, e)| condensate_count(Parity::Even, 0.5, r, e.0)).collect();
    let odd: Vec<f64> = RADII.iter().zip(&energies).map(|(&r, e)| condensate_count(Parity::Odd, 0.5, r, e.1)).collect();
    let pe = count_exponent(&RADII, &even).unwrap();
    let po = count_exponent(&RADII, &odd).unwrap();
    assert!((pe - 1.0).abs() <= 0.1, "even exponent {pe}");
    assert!((po - 3.0).abs() <= 0.1, "odd exponent {po}");
    let none: Vec<f64> = RADII.iter().zip(&energies).map(|(&r, e)| condensate_count(Parity::Even, 0.0, r, e.0)).collect();
    assert!(none.iter().all(|c| *c == 0.0));
}

#[test]
fn l1_profile_examples() {
    for u in [1e-3f64, 1e-2] {
        let direct = 3.0 * (u.sin() - u * u.cos()) / (u * u * u);
        assert!((l1_shape(u) - direct).abs() < 1e-8);
        assert!((l1_shape(u) - (1.0 - u * u / 10.0)).abs() < 1e-8);
    }
    let p = RadialProfile { k: 3.0 * PI / 40.0 };
    for z in [1e-6, 1e-4, 1e-2] {
        assert!((p.value([0.0, 0.0, z]) / z - 1.0).abs() < 1e-4);
    }
    let centered = AxialBump { z0: 0.0, radius: 1.0 };
    assert!(centered.limit_pairing().abs() < 1e-14);
    assert!(centered.pairing(&p).abs() < 1e-14);
    assert!(bound_constant(&p, 20.0, &[[0.0, 0.0, 25.0]]).is_err());
}

#[test]
fn l1_profile_is_uniform_in_the_radius() {
    let radii = [20.0, 40.0, 80.0];
    let entries: Vec<(f64, f64)> = radii.iter().map(|&r| (r, l1_wavenumber(r, 1.0, r + 16.0, 0.05).unwrap().wavenumber)).collect();
    for &(r, k) in &entries {
        assert!(k <= 3.0 * PI / (2.0 * r) * 1.1, "R = {r}: k = {k}");
        assert_eq!(evaluation_points(r).len(), 32);
    }
    let report = l1_profile_check(&entries, &AxialBump { z0: 3.0, radius: 1.0 }).unwrap();
    assert!(report.constant_spread < 2.0, "spread {}", report.constant_spread);
    assert!(report.rows.iter().all(|r| (r.limit - 3.0).abs() < 1e-12));
    let slope = report.deviation_slope.unwrap();
    assert!(slope <= -1.7, "slope {slope}");
}
