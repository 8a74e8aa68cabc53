use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolim_core::fock::{
    build_fock, field_resolvent_oracle, gibbs_trace_dense, gibbs_trace_expectation, lemma33_lhs_exact,
    number_resolvent_matrix, sector_norm_monotonicity, BlockOperator, FockSpace,
};
use thermolim_core::quasifree::{field_resolvent_integral, geometric_resolvent};
use thermolim_core::special::bose_occupation;
use thermolim_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn unit(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn dimensions() {
    assert_eq!(build_fock(1, 3, 3).unwrap().dimension(), 4);
    let two = build_fock(2, 2, 2).unwrap();
    assert_eq!(two.dimension(), 6);
    for s in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
        assert!(two.index_of(&s).is_some());
    }
    assert!(build_fock(3, 200, 200).is_err());
}

#[test]
fn canonical_commutation_relations() {
    let space = build_fock(2, 6, 6).unwrap();
    assert!(space.ccr_defect() <= 20.0 * f64::EPSILON, "{}", space.ccr_defect());
}

#[test]
fn number_resolvent_blocks() {
    let space = build_fock(3, 5, 5).unwrap();
    let f = unit(&[c(1.0), Complex64::new(0.5, -0.5), c(0.25)]);
    for lambda in [0.5, 1.0, 2.0] {
        let a = number_resolvent_matrix(&space, lambda, &f).unwrap();
        assert!((a.block(0)[(0, 0)] - c(1.0 / lambda)).norm() < 1e-15);
        let mut eig: Vec<f64> = a.block(1).clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - 1.0 / (lambda + 1.0)).abs() < 1e-12);
        assert!(eig[1..].iter().all(|e| (e - 1.0 / lambda).abs() < 1e-12));
        for k in 0..space.closed_sectors() {
            assert!((a.sector_norm(k) - 1.0 / lambda).abs() < 1e-12);
        }
        assert!(a.hermiticity_defect() < 1e-14);
    }
}

#[test]
fn lemma33_examples() {
    let g1 = [c(1.0), c(0.0), c(0.0)];
    let g2 = [c(0.0), c(1.0), c(0.0)];
    assert_eq!(lemma33_lhs_exact(1.0, &g1, &g1, 3).unwrap(), 0.0);
    assert!((lemma33_lhs_exact(1.0, &g1, &g2, 1).unwrap() - 0.5).abs() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let a = random_vector(&mut rng, 3);
        let b = random_vector(&mut rng, 3);
        let lambda = rng.gen_range(0.3..3.0);
        let f_norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        for n in 1..=4 {
            let exact = lemma33_lhs_exact(lambda, &a, &b, n).unwrap();
            let bound = 2.0 * n as f64 / (lambda * lambda) * f_norm * diff;
            assert!(exact <= bound + 1e-10, "n = {n}: {exact} > {bound}");
        }
    }
}

#[test]
fn lemma33_exact_value_matches_dense_blocks() {
    let space = build_fock(3, 4, 4).unwrap();
    let g1 = unit(&[c(1.0), c(0.3), Complex64::new(0.0, 0.2)]);
    let g2 = unit(&[c(0.2), c(1.0), c(-0.4)]);
    let diff = number_resolvent_matrix(&space, 0.8, &g1)
        .unwrap()
        .sub(&number_resolvent_matrix(&space, 0.8, &g2).unwrap())
        .unwrap();
    for n in 1..=4 {
        let exact = lemma33_lhs_exact(0.8, &g1, &g2, n).unwrap();
        assert!((exact - diff.sector_norm(n)).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn sector_norms_of_algebra_elements_are_monotone() {
    let space = build_fock(3, 4, 4).unwrap();
    let e1 = [c(1.0), c(0.0), c(0.0)];
    let e2 = [c(0.0), c(1.0), c(0.0)];
    let a = number_resolvent_matrix(&space, 1.0, &e1).unwrap();
    let m = sector_norm_monotonicity(&a, &[0, 1, 2, 3, 4]);
    assert!(m.monotone && m.norms.iter().all(|v| (v - 1.0).abs() < 1e-12));

    let d = a.sub(&number_resolvent_matrix(&space, 1.0, &e2).unwrap()).unwrap();
    assert!(sector_norm_monotonicity(&d, &[1, 2, 3]).monotone);

    // test functions leave the third mode free, as an infinite-dimensional
    // one-particle space always would
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let spanning = |rng: &mut ChaCha8Rng| {
        let mut v = random_vector(rng, 2);
        v.push(c(0.0));
        v
    };
    for trial in 0..20 {
        let mut op = BlockOperator::identity(&space).scaled(c(0.0));
        for _ in 0..2 {
            let x = number_resolvent_matrix(&space, rng.gen_range(0.2..2.0), &spanning(&mut rng)).unwrap();
            let y = number_resolvent_matrix(&space, rng.gen_range(0.2..2.0), &spanning(&mut rng)).unwrap();
            let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            op = op.add(&x.mul(&y).unwrap().scaled(w)).unwrap();
        }
        let m = sector_norm_monotonicity(&op, &(0..space.closed_sectors()).collect::<Vec<_>>());
        assert!(m.monotone, "trial {trial}: {:?}", m.norms);
    }
}

fn two_mode_space() -> FockSpace {
    build_fock(2, 48, 48).unwrap()
}

#[test]
fn gibbs_trace_examples() {
    let space = two_mode_space();
    let energies = [0.5, 1.5];
    let (beta, mu) = (1.0, -0.2);
    let one = gibbs_trace_expectation(&space, &BlockOperator::identity(&space), &energies, beta, mu).unwrap();
    assert!((one - 1.0).abs() < 1e-14);

    let n1 = space.creator(0) * space.annihilator(0);
    let mean = gibbs_trace_dense(&space, &n1, &energies, beta, mu).unwrap().re;
    assert!((mean - bose_occupation(beta, 0.5, mu)).abs() < 1e-9);

    let e1 = [c(1.0), c(0.0)];
    for lambda in [0.5, 1.0, 2.0] {
        let a = number_resolvent_matrix(&space, lambda, &e1).unwrap();
        let trace = gibbs_trace_expectation(&space, &a, &energies, beta, mu).unwrap();
        let series = geometric_resolvent(lambda, 1.0, bose_occupation(beta, 0.5, mu)).unwrap();
        assert!((trace - series).abs() < 1e-8);
    }
}

#[test]
fn mixed_mode_resolvent_matches_geometric_law() {
    let space = two_mode_space();
    let energies = [0.5, 1.5];
    let (beta, mu) = (1.0, -0.2);
    let f = [c(0.6), Complex64::new(0.0, 0.8)];
    let mean = 0.36 * bose_occupation(beta, 0.5, mu) + 0.64 * bose_occupation(beta, 1.5, mu);
    for lambda in [0.5, 1.0, 2.0] {
        let a = number_resolvent_matrix(&space, lambda, &f).unwrap();
        let trace = gibbs_trace_expectation(&space, &a, &energies, beta, mu).unwrap();
        assert!((trace - geometric_resolvent(lambda, 1.0, mean).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn field_resolvent_oracle_sees_vacuum_fluctuations() {
    // ω(e^{iuΦ(f)}) = exp(-u²⟨f, (1 + 2T) f⟩/2) for a quasifree state
    let space = build_fock(1, 160, 160).unwrap();
    let (beta, mu) = (1.0, -0.2);
    let mean = bose_occupation(beta, 0.5, mu);
    for lambda in [1.0, 2.0] {
        let oracle = field_resolvent_oracle(&space, lambda, &[c(1.0)], &[0.5], beta, mu).unwrap();
        let full = field_resolvent_integral(lambda, 1.0 + 2.0 * mean).unwrap();
        assert!((oracle - full).abs() < 1e-8, "{oracle} vs {full}");
    }
    let zero = field_resolvent_oracle(&space, 1.0, &[c(0.0)], &[0.5], beta, mu).unwrap();
    assert!((zero - 1.0).abs() < 1e-14);
}

#[test]
fn gauge_invariant_blocks_commute_with_number() {
    let space = build_fock(2, 4, 4).unwrap();
    let a = number_resolvent_matrix(&space, 1.0, &[c(0.6), c(0.8)]).unwrap();
    let d = space.dimension();
    let mut dense = DMatrix::<Complex64>::zeros(d, d);
    for n in 0..=space.total_cap() {
        let r = space.sector(n);
        dense.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(a.block(n));
    }
    let number = DMatrix::<Complex64>::from_fn(d, d, |i, j| {
        if i == j {
            c(space.state(i).iter().sum::<u32>() as f64)
        } else {
            c(0.0)
        }
    });
    assert!((&dense * &number - &number * &dense).camax() < 1e-14);
}
