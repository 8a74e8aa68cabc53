//! Sector norms of observable differences under trapped versus free dynamics,
//! against the `2nλ⁻²‖f‖‖g1 - g2‖` bound, plus sector-norm monotonicity of
//! random algebra elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thermolim_core::fit::Verdict;
use thermolim_core::fock::{
    build_fock, lemma33_lhs_exact, number_resolvent_matrix, sector_norm_monotonicity, BlockOperator,
};
use thermolim_core::grid::{bump, Grid1D, WaveFunction};
use thermolim_core::propagate::{evolve_free, observable_bound_from_gap, GapProbe, MarginRule};
use thermolim_core::Complex64;

use super::{fmt_list, parse_coupling};
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 10] =
    ["t", "n", "radius", "c", "exact", "bound", "gap", "f_norm", "margin_required", "margin_ok"];
pub const MONOTONICITY_COLUMNS: [&str; 4] = ["trial", "sector", "norm", "monotone"];

struct Params {
    ns: Vec<usize>,
    lambda: f64,
    times: Vec<f64>,
    coupling: thermolim_core::propagate::Coupling,
    r_offset: f64,
    center: f64,
    bump_radius: f64,
    half_width: f64,
    n_points: usize,
    margin: MarginRule,
    bound_tol: f64,
    trials: usize,
    sectors: usize,
    seed: u64,
}

impl Params {
    fn from_config(c: &Config, seed: Option<u64>) -> Result<Self, LabError> {
        let ns = c.usize_list("ns", &[1, 2, 3])?;
        if ns.contains(&0) || ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(crate::ConfigError::Invalid {
                key: "ns".into(),
                value: format!("{ns:?}"),
                reason: "particle numbers must be positive and ascending".into(),
            }
            .into());
        }
        let p = Self {
            ns,
            lambda: c.positive("lambda", 1.0)?,
            times: c.f64_list("times", &[0.25, 0.5, 1.0])?,
            coupling: parse_coupling("coupling", &c.word_list("coupling", &["1"])?[0])?,
            r_offset: c.f64("r_offset", 5.0)?,
            center: c.f64("bump_center", 0.0)?,
            bump_radius: c.positive("bump_radius", 2.0)?,
            half_width: c.positive("half_width", 80.0)?,
            n_points: c.usize("n_points", 4096)?,
            margin: MarginRule {
                base: c.f64("margin_base", 16.0)?,
                velocity_factor: c.f64("margin_velocity", 4.0)?,
                quantile: c.positive("margin_quantile", 0.99999)?,
            },
            bound_tol: c.f64("bound_tol", 1e-10)?,
            trials: c.usize("trials", 20)?,
            sectors: c.usize("max_sector", 4)?,
            seed: c.u64("seed", 33)?,
        };
        Ok(Self { seed: seed.unwrap_or(p.seed), ..p })
    }
}

/// Samples scaled by `√dx`, so the Euclidean product is the `L²` product.
fn coefficients(f: &WaveFunction) -> Vec<Complex64> {
    let s = f.grid().dx().sqrt();
    f.values().iter().map(|v| v * s).collect()
}

struct Row {
    t: f64,
    n: usize,
    radius: f64,
    c: f64,
    exact: f64,
    bound: f64,
    gap: f64,
    f_norm: f64,
    margin_required: f64,
    margin_ok: bool,
}

fn particle_number(p: &Params, n: usize) -> Result<Vec<Row>, LabError> {
    let radius = n as f64 + p.r_offset;
    let grid = Grid1D::new(p.half_width, p.n_points)?;
    let f = bump(p.center, p.bump_radius, &grid)?;
    let c = p.coupling.at(radius);
    let probe = GapProbe::new(&f, radius, c)?;
    let mut rows = Vec::new();
    for &t in &p.times {
        let margin = p.margin.check(&f, t, radius);
        let g1 = probe.evolve_trapped(t)?;
        let g2 = evolve_free(&f, t);
        let gap = g1.sub(&g2)?.norm();
        let exact = lemma33_lhs_exact(p.lambda, &coefficients(&g1), &coefficients(&g2), n)?;
        rows.push(Row {
            t,
            n,
            radius,
            c,
            exact,
            bound: observable_bound_from_gap(n as u32, p.lambda, f.norm(), gap),
            gap,
            f_norm: f.norm(),
            margin_required: margin.required,
            margin_ok: margin.passed(),
        });
    }
    Ok(rows)
}

/// `Σ w · A(λ₁, f) A(λ₂, g)` with test functions in two of three modes, so
/// the third mode stays free as in an infinite-dimensional one-particle space.
pub(crate) fn random_element(rng: &mut ChaCha8Rng, space: &thermolim_core::fock::FockSpace) -> Result<BlockOperator, LabError> {
    let vector = |rng: &mut ChaCha8Rng| {
        vec![
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(0.0, 0.0),
        ]
    };
    let mut op = BlockOperator::identity(space).scaled(Complex64::new(0.0, 0.0));
    for _ in 0..2 {
        let x = number_resolvent_matrix(space, rng.gen_range(0.2..2.0), &vector(rng))?;
        let y = number_resolvent_matrix(space, rng.gen_range(0.2..2.0), &vector(rng))?;
        let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        op = op.add(&x.mul(&y)?.scaled(w))?;
    }
    Ok(op)
}

pub fn run(config: &Config, seed: Option<u64>) -> Result<Report, LabError> {
    let p = Params::from_config(config, seed)?;
    let mut report = Report::new("lemma33", config.finish()?);

    let by_n: Vec<Vec<Row>> = p.ns.par_iter().map(|&n| particle_number(&p, n)).collect::<Result<_, _>>()?;
    let mut table = Table::new("norms", &COLUMNS);
    for (ti, &t) in p.times.iter().enumerate() {
        let rows: Vec<&Row> = by_n.iter().map(|rs| &rs[ti]).collect();
        for r in &rows {
            table.push(vec![
                r.t.into(),
                r.n.into(),
                r.radius.into(),
                r.c.into(),
                r.exact.into(),
                r.bound.into(),
                r.gap.into(),
                r.f_norm.into(),
                r.margin_required.into(),
                r.margin_ok.into(),
            ]);
        }
        let gated = rows.iter().all(|r| r.margin_ok);
        let excess = rows.iter().map(|r| r.exact - r.bound).fold(f64::NEG_INFINITY, f64::max);
        let bound_ok = excess <= p.bound_tol;
        report.checks.push(Check::gated(
            format!("bound t={t}"),
            gated,
            if bound_ok { Verdict::Pass } else { Verdict::Fail },
            format!("max(exact - bound) = {excess:.3e}"),
        ));
        let exact: Vec<f64> = rows.iter().map(|r| r.exact).collect();
        let decreasing = exact.windows(2).all(|w| w[1] < w[0]);
        report.checks.push(Check::gated(
            format!("decrease t={t}"),
            gated,
            if decreasing { Verdict::Pass } else { Verdict::Fail },
            format!("exact norms along R_n: {}", fmt_list(&exact)),
        ));
    }
    report.tables.push(table);

    let space = build_fock(3, p.sectors, p.sectors)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let elements: Vec<BlockOperator> =
        (0..p.trials).map(|_| random_element(&mut rng, &space)).collect::<Result<_, _>>()?;
    let sectors: Vec<usize> = (0..space.closed_sectors()).collect();
    let results: Vec<_> = elements.par_iter().map(|op| sector_norm_monotonicity(op, &sectors)).collect();
    let mut mono = Table::new("monotonicity", &MONOTONICITY_COLUMNS);
    for (trial, m) in results.iter().enumerate() {
        for (k, norm) in m.sectors.iter().zip(&m.norms) {
            mono.push(vec![trial.into(), (*k).into(), (*norm).into(), m.monotone.into()]);
        }
    }
    let failures = results.iter().filter(|m| !m.monotone).count();
    report.checks.push(Check::from_bool(
        "sector monotonicity",
        failures == 0 && !results.is_empty(),
        format!("{} of {} seeded elements monotone over sectors 0..={}", results.len() - failures, results.len(), p.sectors),
    ));
    report.tables.push(mono);
    Ok(report)
}
