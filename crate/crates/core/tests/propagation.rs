use thermolim_core::fit::Verdict;
use thermolim_core::grid::{bump, BumpSpec, Grid1D};
use thermolim_core::hamiltonian::{assemble, PotentialSpec};
use thermolim_core::propagate::{
    duhamel_bound, evolve_free, evolve_spectral, gap_decay_scan, observable_bound_from_gap, observable_gap_bound,
    propagator_gap, Coupling, GapProbe, MarginRule,
};
use thermolim_core::Complex64;

const RADII: [f64; 5] = [6.0, 8.0, 10.0, 12.0, 14.0];

fn scan_grid(r: f64) -> thermolim_core::Result<Grid1D> {
    Grid1D::new(2.0 * r + 16.0, 4096)
}

#[test]
fn spectral_evolution_examples() {
    let g = Grid1D::new(12.0, 512).unwrap();
    let d = assemble(&g, &PotentialSpec::truncated_harmonic(4.0, 1.0)).unwrap().diagonalize().unwrap();
    let f = bump(0.5, 2.0, &g).unwrap();
    assert!(evolve_spectral(&d, &f, 0.0).unwrap().sub(&f).unwrap().norm() < 1e-12);
    for t in [0.3, 2.0, 17.0] {
        assert!((evolve_spectral(&d, &f, t).unwrap().norm() - 1.0).abs() < 1e-10);
    }
    let psi = d.wavefunction(3).unwrap();
    let phase = Complex64::new(0.0, -1.3 * d.eigenvalue(3)).exp();
    let out = evolve_spectral(&d, &psi, 1.3).unwrap();
    assert!(out.sub(&psi.scaled_complex(phase)).unwrap().norm() < 1e-9);
}

#[test]
fn free_evolution_examples() {
    let g = Grid1D::new(64.0, 2048).unwrap();
    let f = bump(0.0, 2.0, &g).unwrap();
    assert_eq!(evolve_free(&f, 0.0), f);
    assert!((evolve_free(&f, 3.0).norm() - 1.0).abs() < 1e-10);
    let d = assemble(&g, &PotentialSpec::Free).unwrap().diagonalize().unwrap();
    let diff = evolve_spectral(&d, &f, 1.0).unwrap().sub(&evolve_free(&f, 1.0)).unwrap().norm();
    assert!(diff <= 1e-6, "{diff}");
}

#[test]
fn gap_examples() {
    let g = Grid1D::new(80.0, 4096).unwrap();
    let f = bump(0.0, 2.0, &g).unwrap();
    assert_eq!(propagator_gap(&f, 0.0, 8.0, 1.0).unwrap(), 0.0);
    for t in [0.25, 0.5, 1.0] {
        assert!(propagator_gap(&f, t, 8.0, 0.0).unwrap() <= 1e-8);
    }
    assert_eq!(duhamel_bound(&f, 0.0, 8.0, 1.0).unwrap(), 0.0);
    assert_eq!(duhamel_bound(&f, 1.0, 8.0, 0.0).unwrap(), 0.0);

    let probe = GapProbe::new(&f, 8.0, 1.0).unwrap();
    let gap = probe.gap(1.0).unwrap();
    assert!(probe.duhamel_bound(1.0).unwrap() >= gap);

    let gaps: Vec<f64> = [6.0, 8.0, 10.0, 12.0]
        .iter()
        .map(|&r| {
            let f = bump(0.0, 2.0, &scan_grid(r).unwrap()).unwrap();
            GapProbe::new(&f, r, 1.0).unwrap().gap(1.0).unwrap()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn margin_rule_rejects_small_boxes() {
    let f = bump(0.0, 2.0, &Grid1D::new(12.0, 1024).unwrap()).unwrap();
    let check = MarginRule::default().check(&f, 1.0, 8.0);
    assert!(!check.passed());
    assert!(propagator_gap(&f, 1.0, 8.0, 1.0).is_err());
    assert!(duhamel_bound(&f, 1.0, 8.0, 1.0).is_err());
}

#[test]
fn decay_scan_at_unit_time_constant_coupling() {
    let r = gap_decay_scan(BumpSpec::new(0.0, 2.0), 1.0, &RADII, Coupling::Constant(1.0), scan_grid).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.rows);
}

#[test]
fn decay_scan_at_unit_time_linear_coupling() {
    let c = Coupling::power(1.0, 1.0).unwrap();
    let r = gap_decay_scan(BumpSpec::new(0.0, 2.0), 1.0, &RADII, c, scan_grid).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.rows);
}

#[test]
fn decay_scan_at_zero_time_is_trivial() {
    let r = gap_decay_scan(BumpSpec::new(0.0, 2.0), 0.0, &RADII, Coupling::Constant(1.0), scan_grid).unwrap();
    assert_eq!(r.verdict, Verdict::Trivial);
    assert!(r.rows.iter().all(|row| row.value == 0.0));
    assert!(gap_decay_scan(BumpSpec::new(0.0, 2.0), 1.0, &RADII[..3], Coupling::Constant(1.0), scan_grid).is_err());
    assert!(Coupling::power(1.0, 3.0).is_err());
}

#[test]
fn observable_bound_examples() {
    let g = Grid1D::new(84.0, 4096).unwrap();
    let f = bump(0.0, 2.0, &g).unwrap();
    assert_eq!(observable_gap_bound(3, 1.0, &f, 0.0, 8.0, 1.0).unwrap(), 0.0);
    assert_eq!(observable_bound_from_gap(4, 1.5, 2.0, 0.1), 2.0 * observable_bound_from_gap(2, 1.5, 2.0, 0.1));

    let weighted: Vec<f64> = (6..=14).map(|n| observable_gap_bound(n, 1.0, &f, 1.0, n as f64, 1.0).unwrap()).collect();
    assert!(weighted.windows(2).all(|w| w[1] < w[0]), "{weighted:?}");
}
