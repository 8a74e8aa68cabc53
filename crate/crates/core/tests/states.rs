use std::f64::consts::PI;

use thermolim_core::fock::{build_fock, gibbs_trace_expectation, number_resolvent_matrix};
use thermolim_core::grid::{bump, Grid1D, WaveFunction};
use thermolim_core::hamiltonian::{assemble, PotentialSpec};
use thermolim_core::quasifree::{
    field_resolvent_integral, geometric_resolvent, homogeneous_density, mu_limit_scan, MuLimitVerdict, RadialBump,
};
use thermolim_core::{Complex64, Condensate, CondensateMode, QuasifreeState, ThermalCloud};

fn small_trap() -> (Grid1D, thermolim_core::SpectralDecomposition) {
    let g = Grid1D::new(12.0, 256).unwrap();
    let d = assemble(&g, &PotentialSpec::truncated_harmonic(3.0, 1.0)).unwrap().diagonalize().unwrap();
    (g, d)
}

/// `(2π)^{-1} Σ_k e^{kβμ} √(π/(kβ))`.
fn polylog_density_1d(beta: f64, mu: f64) -> f64 {
    (1..2000).map(|k| (k as f64 * beta * mu).exp() * (PI / (k as f64 * beta)).sqrt()).sum::<f64>() / (2.0 * PI)
}

#[test]
fn vacuum_limit_and_condensate_injection() {
    let (g, d) = small_trap();
    let f = bump(0.5, 1.5, &g).unwrap();
    let cold = QuasifreeState::new(200.0, -1.0, ThermalCloud::Trapped(d.clone()), None).unwrap();
    assert!(cold.two_point(&f, &f).unwrap().norm() <= 1e-8);

    let h = d.wavefunction(0).unwrap();
    let with_h = QuasifreeState::new(
        200.0,
        -1.0,
        ThermalCloud::Trapped(d),
        Some(Condensate::new(0.5, CondensateMode::Grid(h.clone())).unwrap()),
    )
    .unwrap();
    assert!((with_h.two_point(&h, &h).unwrap().re - 0.25).abs() < 1e-8);

    let left = bump(-3.0, 1.0, &g).unwrap();
    let right = bump(3.0, 1.0, &g).unwrap();
    let pure = QuasifreeState::new(
        1.0,
        -1.0,
        ThermalCloud::Absent,
        Some(Condensate::new(2.0, CondensateMode::Grid(left)).unwrap()),
    )
    .unwrap();
    assert_eq!(pure.two_point(&right, &right).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn interior_density_approaches_homogeneous_value() {
    let r = 80.0;
    let g = Grid1D::with_spacing(r + 8.0, 0.05).unwrap();
    let d = assemble(&g, &PotentialSpec::truncated_harmonic(r, 1.0)).unwrap().below(40.0).unwrap();
    let state = QuasifreeState::new(1.0, -1.0, ThermalCloud::Trapped(d), None).unwrap();
    let expected = homogeneous_density(1.0, -1.0, 1).unwrap();
    let got = state.thermal_density(0.0).unwrap();
    assert!((got / expected - 1.0).abs() < 0.01, "{got} vs {expected}");
}

#[test]
fn homogeneous_density_examples() {
    let n1 = homogeneous_density(1.0, -1.0, 1).unwrap();
    assert!(n1 > 0.0 && n1.is_finite());
    assert!((n1 / polylog_density_1d(1.0, -1.0) - 1.0).abs() < 1e-9);

    let seq: Vec<f64> = [-0.1, -0.01, -0.001].iter().map(|&mu| homogeneous_density(1.0, mu, 1).unwrap()).collect();
    assert!(seq.windows(2).all(|w| w[1] > 2.0 * w[0]), "{seq:?}");

    let zeta32 = 2.612_375_348_685_488;
    let critical = homogeneous_density(1.0, 0.0, 3).unwrap();
    assert!((critical / (zeta32 / (8.0 * PI.powf(1.5))) - 1.0).abs() < 1e-8);
    assert!(homogeneous_density(1.0, 0.0, 1).is_err());
}

#[test]
fn field_resolvent_examples() {
    for lambda in [0.5, 1.0, 3.0] {
        assert_eq!(field_resolvent_integral(lambda, 0.0).unwrap(), 1.0 / lambda);
        assert!(field_resolvent_integral(lambda, 0.3).unwrap() < 1.0 / lambda);
    }
    let sigma: f64 = 1.0;
    let closed = (0.5 / (sigma * sigma)).exp() / sigma * (PI / 2.0).sqrt() * libm::erfc(1.0 / (sigma * 2f64.sqrt()));
    assert!((field_resolvent_integral(1.0, 1.0).unwrap() - closed).abs() < 1e-10);
}

#[test]
fn number_resolvent_examples() {
    let (g, d) = small_trap();
    let f = bump(0.0, 2.0, &g).unwrap();
    let empty = QuasifreeState::new(1.0, -1.0, ThermalCloud::Absent, None).unwrap();
    assert_eq!(empty.number_resolvent_expectation(2.0, &f).unwrap(), 0.5);

    // mode 0 with mean occupation 1
    let mu = d.eigenvalue(0) - 2f64.ln();
    let psi = d.wavefunction(0).unwrap();
    let state = QuasifreeState::new(1.0, mu, ThermalCloud::Trapped(d), None).unwrap();
    let ours = state.number_resolvent_expectation(1.0, &psi).unwrap();

    let space = build_fock(1, 80, 80).unwrap();
    let op = number_resolvent_matrix(&space, 1.0, &[Complex64::new(1.0, 0.0)]).unwrap();
    let oracle = gibbs_trace_expectation(&space, &op, &[2f64.ln()], 1.0, 0.0).unwrap();
    assert!((ours - oracle).abs() < 1e-8, "{ours} vs {oracle}");
    assert!((geometric_resolvent(1.0, 1.0, 1.0).unwrap() - oracle).abs() < 1e-8);
}

/// `f(x) - f(-x-δ)` for a centered unit-integral bump, `δ` a whole number of cells.
fn antisymmetrized(g: &Grid1D, delta: f64) -> WaveFunction {
    let f = bump(0.0, 1.0, g).unwrap().with_unit_integral().unwrap();
    let cells = (delta / g.dx()).round() as isize;
    assert_eq!(cells as f64 * g.dx(), delta);
    f.sub(&f.reflected().shifted_cells(-cells)).unwrap()
}

#[test]
fn mu_limit_verdicts() {
    let g = Grid1D::new(16.0, 2048).unwrap();
    let mus: Vec<f64> = (2..=14).map(|k| -(10f64).powf(-0.5 * k as f64)).collect();
    let f = bump(0.0, 1.0, &g).unwrap().with_unit_integral().unwrap();
    let scan = mu_limit_scan(1.0, &f, 1.0, &mus, 0.0).unwrap();
    assert_eq!(scan.verdict, MuLimitVerdict::Vanishes, "ratio {}", scan.ratio);

    let d0 = antisymmetrized(&g, 0.25);
    assert!(d0.integral().norm() < 1e-14);
    let plain = mu_limit_scan(1.0, &d0, 1.0, &mus, 0.0).unwrap();
    assert_eq!(plain.verdict, MuLimitVerdict::ConvergesPositive);
    let with_condensate = mu_limit_scan(1.0, &d0, 1.0, &mus, 0.5).unwrap();
    assert_eq!(with_condensate.verdict, plain.verdict);
}

#[test]
fn temporal_correlation_examples() {
    let g = Grid1D::new(40.0, 2048).unwrap();
    let f = bump(0.0, 1.0, &g).unwrap();
    let k = bump(2.0, 1.0, &g).unwrap();
    let state = QuasifreeState::new(1.0, -0.5, ThermalCloud::Homogeneous { dimension: 1 }, None).unwrap();
    let at_zero = state.temporal_correlation(&f, &k, 0.0).unwrap().total();
    assert!((at_zero - state.two_point(&f, &k).unwrap()).norm() < 1e-12);

    let f3 = RadialBump::with_integral(1.0, 1.0).unwrap();
    let cold = QuasifreeState::new(1.0, 0.0, ThermalCloud::Homogeneous { dimension: 3 }, None).unwrap();
    let mags: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|&t| cold.temporal_correlation_3d(&f3, &f3, t).unwrap().total().norm())
        .collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]), "{mags:?}");

    let warm = QuasifreeState::new(
        1.0,
        0.0,
        ThermalCloud::Homogeneous { dimension: 3 },
        Some(Condensate::new(0.5, CondensateMode::Even).unwrap()),
    )
    .unwrap();
    for t in [0.0, 5.0, 40.0, 640.0] {
        let c = warm.temporal_correlation_3d(&f3, &f3, t).unwrap();
        assert_eq!(c.condensate, Complex64::new(0.25, 0.0));
        assert!((c.total() - c.thermal - 0.25).norm() <= 1e-10);
    }
    assert!(QuasifreeState::new(1.0, 0.0, ThermalCloud::Homogeneous { dimension: 1 }, None).is_err());
}

#[test]
fn local_particle_numbers() {
    let (_, d) = small_trap();
    let state = QuasifreeState::new(1.0, -0.5, ThermalCloud::Trapped(d), None).unwrap();
    assert_eq!(state.local_particle_number(1.0, 1.0).unwrap(), 0.0);
    let whole = state.local_particle_number(-4.0, 4.0).unwrap();
    let split = state.local_particle_number(-4.0, 0.5).unwrap() + state.local_particle_number(0.5, 4.0).unwrap();
    assert!((whole - split).abs() < 1e-12 * whole);
}

#[test]
fn stationarity_of_the_condensate_term() {
    let (g, d) = small_trap();
    let h = d.wavefunction(0).unwrap();
    let state = QuasifreeState::new(
        1.0,
        -0.5,
        ThermalCloud::Trapped(d.clone()),
        Some(Condensate::new(0.7, CondensateMode::Grid(h)).unwrap()),
    )
    .unwrap();
    let f = bump(0.5, 1.0, &g).unwrap();
    let k = bump(-0.5, 1.5, &g).unwrap();
    // ω(α_s(X)) = ω(X): evolving both arguments by the same time changes nothing
    let base = state.two_point(&f, &k).unwrap();
    for s in [0.3, 1.7, 9.0] {
        let fs = thermolim_core::propagate::evolve_spectral(&d, &f, s).unwrap();
        let ks = thermolim_core::propagate::evolve_spectral(&d, &k, s).unwrap();
        assert!((state.two_point(&fs, &ks).unwrap() - base).norm() < 1e-10);
    }
}
