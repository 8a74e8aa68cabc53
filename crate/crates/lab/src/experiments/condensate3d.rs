//! The lowest `l = 1` radial trap mode in 3D: wavenumber bound, uniform
//! profile constant and smeared pairings against `∫ z f`.

use rayon::prelude::*;
use std::f64::consts::PI;
use thermolim_core::condensate::{l1_profile_check, l1_wavenumber, AxialBump, L1Mode};
use thermolim_core::fit::Verdict;

use super::fmt_list;
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 9] =
    ["radius", "k", "k_bound", "edge_amplitude", "bound_constant", "pairing", "limit", "deviation", "gated"];

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let radii = c.ascending("radii", &[20.0, 40.0, 80.0])?;
    let coupling = c.positive("coupling", 1.0)?;
    let dr = c.positive("dr", 0.05)?;
    let pad = c.positive("box_pad", 16.0)?;
    let f = AxialBump { z0: c.f64("bump_z", 3.0)?, radius: c.positive("bump_radius", 1.0)? };
    let spread_max = c.positive("spread_max", 2.0)?;
    let slope_max = c.f64("slope_max", -1.7)?;
    let k_factor = c.positive("k_factor", 1.1)?;
    let edge_tol = c.positive("edge_tol", 1e-8)?;
    let mut report = Report::new("condensate3d", config.finish()?);

    let modes: Vec<L1Mode> =
        radii.par_iter().map(|&r| l1_wavenumber(r, coupling, r + pad, dr)).collect::<Result<_, _>>()?;
    let entries: Vec<(f64, f64)> = radii.iter().zip(&modes).map(|(&r, m)| (r, m.wavenumber)).collect();
    let profile = l1_profile_check(&entries, &f)?;

    let mut table = Table::new("profile", &COLUMNS);
    for ((row, m), &r) in profile.rows.iter().zip(&modes).zip(&radii) {
        table.push(vec![
            r.into(),
            row.k.into(),
            (3.0 * PI / (2.0 * r)).into(),
            m.edge_amplitude.into(),
            row.bound_constant.into(),
            row.pairing.into(),
            row.limit.into(),
            row.deviation.into(),
            (m.edge_amplitude <= edge_tol).into(),
        ]);
    }
    report.tables.push(table);

    let gated = modes.iter().all(|m| m.edge_amplitude <= edge_tol);
    let judge = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
    let ratios: Vec<f64> = entries.iter().map(|&(r, k)| k / (3.0 * PI / (2.0 * r))).collect();
    report.checks.push(Check::gated(
        "wavenumber bound",
        gated,
        judge(ratios.iter().all(|q| *q <= k_factor)),
        format!("k_R / (3π/2R) = {}", fmt_list(&ratios)),
    ));
    let constants: Vec<f64> = profile.rows.iter().map(|r| r.bound_constant).collect();
    report.checks.push(Check::gated(
        "uniform bound constant",
        gated,
        judge(profile.constant_spread < spread_max),
        format!("spread {:.4}; constants {}", profile.constant_spread, fmt_list(&constants)),
    ));
    let deviations: Vec<f64> = profile.rows.iter().map(|r| r.deviation).collect();
    let (verdict, slope) = match profile.deviation_slope {
        Some(s) => (judge(s <= slope_max), s),
        None => (Verdict::InconclusiveFloor, f64::NAN),
    };
    report.checks.push(Check::gated(
        "pairing convergence",
        gated,
        verdict,
        format!("slope {slope:.3}; deviations {}", fmt_list(&deviations)),
    ));
    report.metric("constant_spread", profile.constant_spread);
    report.metric("deviation_slope", slope);
    Ok(report)
}
