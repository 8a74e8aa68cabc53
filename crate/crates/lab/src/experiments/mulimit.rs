//! `ω(A(λ, f))` in the homogeneous 1D cloud as `μ ↗ 0`, for a test function
//! with `∫f = 1` and an antisymmetrized one with `∫f = 0`.

use rayon::prelude::*;
use thermolim_core::fit::Verdict;
use thermolim_core::grid::{bump, Grid1D, WaveFunction};
use thermolim_core::quasifree::{mu_limit_scan, MuLimitScan};

use super::fmt_list;
use crate::config::{Config, ConfigError};
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 5] = ["function", "kappa", "mu", "mean_occupation", "value"];

struct Params {
    lambda: f64,
    beta: f64,
    mus: Vec<f64>,
    bump_radius: f64,
    d0_shift: f64,
    kappa: f64,
    half_width: f64,
    n_points: usize,
    decrease_min: f64,
    cauchy_tol: f64,
}

/// `f(x) - f(-x - δ)` for the centered unit-integral bump, `δ` a whole number of cells.
fn antisymmetrized(grid: &Grid1D, radius: f64, delta: f64) -> Result<WaveFunction, LabError> {
    let f = bump(0.0, radius, grid)?.with_unit_integral()?;
    let cells = (delta / grid.dx()).round();
    if (cells * grid.dx() - delta).abs() > 1e-9 * grid.dx() {
        return Err(ConfigError::Invalid {
            key: "d0_shift".into(),
            value: delta.to_string(),
            reason: format!("must be a multiple of the spacing {}", grid.dx()),
        }
        .into());
    }
    Ok(f.sub(&f.reflected().shifted_cells(-(cells as isize)))?)
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let default_mus: Vec<f64> = (2..=8).map(|k| -(10f64).powf(-0.5 * k as f64)).collect();
    let p = Params {
        lambda: c.positive("lambda", 1.0)?,
        beta: c.positive("beta", 1.0)?,
        mus: c.ascending("mus", &default_mus)?,
        bump_radius: c.positive("bump_radius", 1.0)?,
        d0_shift: c.positive("d0_shift", 0.25)?,
        kappa: c.f64("kappa", 0.5)?,
        half_width: c.positive("half_width", 16.0)?,
        n_points: c.usize("n_points", 2048)?,
        decrease_min: c.positive("decrease_min", 0.95)?,
        cauchy_tol: c.positive("cauchy_tol", 1e-4)?,
    };
    let mut report = Report::new("mulimit", config.finish()?);

    let grid = Grid1D::new(p.half_width, p.n_points)?;
    let unit = bump(0.0, p.bump_radius, &grid)?.with_unit_integral()?;
    let d0 = antisymmetrized(&grid, p.bump_radius, p.d0_shift)?;
    report.metric("d0_integral", d0.integral().norm());
    let jobs: Vec<(&str, &WaveFunction, f64)> =
        vec![("unit-integral", &unit, 0.0), ("zero-integral", &d0, 0.0), ("zero-integral", &d0, p.kappa)];
    let scans: Vec<MuLimitScan> = jobs
        .par_iter()
        .map(|(_, f, kappa)| mu_limit_scan(p.lambda, f, p.beta, &p.mus, *kappa))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new("scan", &COLUMNS);
    for ((name, _, kappa), scan) in jobs.iter().zip(&scans) {
        for row in &scan.rows {
            table.push(vec![(*name).into(), (*kappa).into(), row.mu.into(), row.mean_occupation.into(), row.value.into()]);
        }
    }
    report.tables.push(table);

    let values = |s: &MuLimitScan| s.rows.iter().map(|r| r.value).collect::<Vec<f64>>();
    let unit_scan = &scans[0];
    let decrease = 1.0 - unit_scan.ratio;
    let decreasing = values(unit_scan).windows(2).all(|w| w[1] < w[0]);
    report.checks.push(Check::from_bool(
        "unit integral vanishes",
        decreasing && decrease >= p.decrease_min,
        format!(
            "decrease {:.2}% (need {:.0}%), core verdict {}; values {}",
            100.0 * decrease,
            100.0 * p.decrease_min,
            unit_scan.verdict.as_str(),
            fmt_list(&values(unit_scan))
        ),
    ));

    let d0_scan = &scans[1];
    let last = d0_scan.rows.last().map(|r| r.value).unwrap_or(0.0);
    report.checks.push(Check::from_bool(
        "zero integral converges",
        d0_scan.tail_spread < p.cauchy_tol && last > 0.0,
        format!(
            "tail spread {:.3e} (need < {:.0e}), limit {last:.6}, core verdict {}",
            d0_scan.tail_spread,
            p.cauchy_tol,
            d0_scan.verdict.as_str()
        ),
    ));
    let same = values(d0_scan) == values(&scans[2]);
    report.checks.push(Check::new(
        "condensate independence",
        if same { Verdict::Pass } else { Verdict::Fail },
        format!("κ = {} leaves every zero-integral value unchanged: {same}", p.kappa),
    ));
    report.metric("unit_ratio", unit_scan.ratio);
    report.metric("d0_tail_spread", d0_scan.tail_spread);
    Ok(report)
}
