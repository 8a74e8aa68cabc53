//! Temporal correlations of radial test functions in the 3D homogeneous cloud
//! at `μ = 0`, with and without a constant-mode condensate.

use std::f64::consts::PI;

use rayon::prelude::*;
use thermolim_core::fit::Verdict;
use thermolim_core::quasifree::{radial_thermal_on_ray, RadialBump};
use thermolim_core::{Condensate, CondensateMode, QuasifreeState, ThermalCloud};

use super::fmt_list;
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 10] = [
    "t",
    "thermal_re",
    "thermal_im",
    "thermal_abs",
    "condensate",
    "total_minus_thermal",
    "memory_error",
    "contour_difference",
    "gated",
    "gate_note",
];

struct Row {
    t: f64,
    thermal: thermolim_core::Complex64,
    condensate: f64,
    rest: f64,
    contour_difference: f64,
    gated: bool,
    note: String,
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let beta = c.positive("beta", 1.0)?;
    let mu = c.f64("mu", 0.0)?;
    let kappa = c.f64("kappa", 0.5)?;
    let f = RadialBump::with_integral(c.positive("f_radius", 1.0)?, c.f64("f_integral", 1.0)?)?;
    let g = RadialBump::with_integral(c.positive("g_radius", 1.0)?, c.f64("g_integral", 1.0)?)?;
    let default_times: Vec<f64> = (0..11).map(|k| 5.0 * 2f64.powi(k)).collect();
    let times = c.ascending("times", &default_times)?;
    let threshold = c.positive("threshold", 1e-3)?;
    let tolerance = c.positive("tolerance", 1e-10)?;
    let contour_tol = c.positive("contour_tol", 1e-9)?;
    let check_angle = c.f64("check_angle", PI / 12.0)?;
    let mut report = Report::new("memory", config.finish()?);

    let condensate = if kappa > 0.0 { Some(Condensate::new(kappa, CondensateMode::Even)?) } else { None };
    let state = QuasifreeState::new(beta, mu, ThermalCloud::Homogeneous { dimension: 3 }, condensate)?;
    let expected = kappa * kappa * f.integral() * g.integral();

    let rows: Vec<Row> = times
        .par_iter()
        .map(|&t| {
            let measured = state.temporal_correlation_3d(&f, &g, t).and_then(|corr| {
                let angle = if t == 0.0 { 0.0 } else { check_angle.copysign(t) };
                let other = radial_thermal_on_ray(beta, mu, &f, &g, t, angle)?;
                Ok((corr, (other - corr.thermal).norm()))
            });
            match measured {
                Ok((corr, diff)) => Row {
                    t,
                    thermal: corr.thermal,
                    condensate: corr.condensate.re,
                    rest: (corr.total() - corr.thermal).re,
                    contour_difference: diff,
                    gated: diff <= contour_tol,
                    note: if diff <= contour_tol { String::new() } else { "contours disagree".into() },
                },
                Err(e) => Row {
                    t,
                    thermal: f64::NAN.into(),
                    condensate: f64::NAN,
                    rest: f64::NAN,
                    contour_difference: f64::NAN,
                    gated: false,
                    note: e.to_string(),
                },
            }
        })
        .collect();

    let mut table = Table::new("correlations", &COLUMNS);
    for r in &rows {
        table.push(vec![
            r.t.into(),
            r.thermal.re.into(),
            r.thermal.im.into(),
            r.thermal.norm().into(),
            r.condensate.into(),
            r.rest.into(),
            (r.rest - expected).abs().into(),
            r.contour_difference.into(),
            r.gated.into(),
            r.note.clone().into(),
        ]);
    }
    report.tables.push(table);

    let magnitudes: Vec<f64> = rows.iter().map(|r| r.thermal.norm()).collect();
    let decay = match rows.iter().rev().find(|r| r.gated) {
        None => Check::new("thermal decay", Verdict::InvalidGate, "no time passed the contour gate"),
        Some(last) => Check::from_bool(
            "thermal decay",
            last.thermal.norm() < threshold,
            format!("|thermal| = {:.3e} at t = {} (largest gated); magnitudes {}", last.thermal.norm(), last.t, fmt_list(&magnitudes)),
        ),
    };
    report.checks.push(decay);

    let memory = if kappa == 0.0 {
        Check::new("memory", Verdict::Trivial, "decay-only: κ = 0, no condensate term")
    } else {
        let worst = rows.iter().map(|r| (r.rest - expected).abs()).fold(0.0, f64::max);
        Check::gated(
            "memory",
            rows.iter().all(|r| r.gated),
            if worst <= tolerance { Verdict::Pass } else { Verdict::Fail },
            format!("max |total - thermal - {expected}| = {worst:.3e}"),
        )
    };
    report.checks.push(memory);
    report.metric("condensate_term", expected);
    Ok(report)
}
