//! Resolvent expectations of a two-level thermal state against truncated
//! Fock-space traces.
//!
//! The two levels are the lowest modes of a harmonic well whose coupling and
//! offset are tuned until the discrete energies equal the configured pair, so
//! the state goes through the same grid pipeline as every other experiment.

use rayon::prelude::*;
use thermolim_core::fit::Verdict;
use thermolim_core::fock::{build_fock, field_resolvent_oracle, gibbs_trace_expectation, number_resolvent_matrix};
use thermolim_core::hamiltonian::{assemble, PotentialSpec};
use thermolim_core::quasifree::field_resolvent_integral;
use thermolim_core::special::gaussian_laplace;
use thermolim_core::{Complex64, Grid1D, QuasifreeState, SpectralDecomposition, ThermalCloud};

use crate::config::{Config, ConfigError};
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 11] = [
    "lambda",
    "number_expectation",
    "number_fock",
    "number_delta",
    "field_expectation",
    "field_closed_form",
    "field_closed_delta",
    "field_fock",
    "field_fock_delta",
    "vacuum_corrected_delta",
    "fock_truncation_change",
];

struct Params {
    energies: [f64; 2],
    beta: f64,
    mu: f64,
    lambdas: Vec<f64>,
    coefficients: [f64; 2],
    number_cap: usize,
    field_cap: usize,
    field_cap_coarse: usize,
    tolerance: f64,
    half_width: f64,
    n_points: usize,
}

/// Harmonic well `c²x² + offset` whose two lowest discrete levels are `target`.
fn two_level_trap(grid: &Grid1D, target: [f64; 2]) -> Result<SpectralDecomposition, LabError> {
    let zeros = vec![0.0; grid.len()];
    let levels = |coupling: f64, offset: f64| -> Result<SpectralDecomposition, LabError> {
        let potential = PotentialSpec::General { coupling, offset, extra: zeros.clone() };
        Ok(assemble(grid, &potential)?.diagonalize()?)
    };
    // harmonic levels (2k + 1) c; the lattice spacing shrinks slightly, so rescale
    let mut coupling = 0.5 * (target[1] - target[0]);
    for _ in 0..8 {
        let d = levels(coupling, 0.0)?;
        coupling *= (target[1] - target[0]) / (d.eigenvalue(1) - d.eigenvalue(0));
    }
    let offset = target[0] - levels(coupling, 0.0)?.eigenvalue(0);
    levels(coupling, offset)
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let pair = |key: &str, default: [f64; 2]| -> Result<[f64; 2], LabError> {
        let v = c.f64_list(key, &default)?;
        match v[..] {
            [a, b] => Ok([a, b]),
            _ => Err(ConfigError::Invalid { key: key.into(), value: format!("{v:?}"), reason: "expected two values".into() }.into()),
        }
    };
    let p = Params {
        energies: pair("energies", [0.5, 1.5])?,
        beta: c.positive("beta", 1.0)?,
        mu: c.f64("mu", -0.2)?,
        lambdas: c.f64_list("lambdas", &[0.5, 1.0, 2.0])?,
        coefficients: pair("coefficients", [0.6, 0.8])?,
        number_cap: c.usize("number_fock_cap", 60)?,
        field_cap: c.usize("field_fock_cap", 50)?,
        field_cap_coarse: c.usize("field_fock_cap_coarse", 40)?,
        tolerance: c.positive("tolerance", 1e-8)?,
        half_width: c.positive("half_width", 12.0)?,
        n_points: c.usize("n_points", 512)?,
    };
    if !(p.energies[1] > p.energies[0]) || p.lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(ConfigError::Invalid {
            key: "energies".into(),
            value: format!("{:?}", p.energies),
            reason: "need ascending energies and positive λ".into(),
        }
        .into());
    }
    let mut report = Report::new("resolvent", config.finish()?);

    let grid = Grid1D::new(p.half_width, p.n_points)?;
    let d = two_level_trap(&grid, p.energies)?;
    let energies = [d.eigenvalue(0), d.eigenvalue(1)];
    let f = d.wavefunction(0)?.scaled(p.coefficients[0]).add(&d.wavefunction(1)?.scaled(p.coefficients[1]))?;
    let edge = d.edge_amplitude(0).max(d.edge_amplitude(1));
    let state = QuasifreeState::new(p.beta, p.mu, ThermalCloud::Trapped(d), None)?;
    let sigma2 = state.thermal_two_point(&f, &f)?.re;
    let norm2 = f.norm().powi(2);
    report.metric("energy_0", energies[0]);
    report.metric("energy_1", energies[1]);
    report.metric("sigma2", sigma2);
    report.metric("mode_edge_amplitude", edge);

    let coeffs: Vec<Complex64> = p.coefficients.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let number_space = build_fock(2, p.number_cap, p.number_cap)?;
    let field_space = build_fock(2, p.field_cap, p.field_cap)?;
    let coarse_space = build_fock(2, p.field_cap_coarse, p.field_cap_coarse)?;

    let rows: Vec<[f64; 11]> = p
        .lambdas
        .par_iter()
        .map(|&lambda| -> Result<[f64; 11], LabError> {
            let number = state.number_resolvent_expectation(lambda, &f)?;
            let op = number_resolvent_matrix(&number_space, lambda, &coeffs)?;
            let number_fock = gibbs_trace_expectation(&number_space, &op, &energies, p.beta, p.mu)?;
            let field = state.field_resolvent_expectation(lambda, &f)?;
            let closed = gaussian_laplace(lambda, sigma2.sqrt());
            let fock = field_resolvent_oracle(&field_space, lambda, &coeffs, &energies, p.beta, p.mu)?;
            let coarse = field_resolvent_oracle(&coarse_space, lambda, &coeffs, &energies, p.beta, p.mu)?;
            let vacuum = field_resolvent_integral(lambda, norm2 + 2.0 * sigma2)?;
            Ok([
                lambda,
                number,
                number_fock,
                number - number_fock,
                field,
                closed,
                field - closed,
                fock,
                field - fock,
                vacuum - fock,
                fock - coarse,
            ])
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new("resolvents", &COLUMNS);
    for r in &rows {
        table.push(r.iter().map(|v| (*v).into()).collect());
    }
    report.tables.push(table);

    let gated = edge <= 1e-8;
    let worst = |i: usize| rows.iter().map(|r| r[i].abs()).fold(0.0, f64::max);
    let judge = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
    report.checks.push(Check::gated(
        "number resolvent vs fock trace",
        gated,
        judge(worst(3) <= p.tolerance),
        format!("max |delta| = {:.3e}", worst(3)),
    ));
    report.checks.push(Check::gated(
        "field resolvent vs closed form",
        gated,
        judge(worst(6) <= p.tolerance),
        format!("max |delta| = {:.3e}", worst(6)),
    ));
    report.metric("field_fock_delta_max", worst(8));
    report.metric("vacuum_corrected_delta_max", worst(9));
    report.metric("fock_truncation_change_max", worst(10));
    Ok(report)
}
