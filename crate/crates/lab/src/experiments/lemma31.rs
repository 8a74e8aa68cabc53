//! Trapped-to-free propagator gaps over a radius scan, with the Duhamel bound.

use rayon::prelude::*;
use thermolim_core::fit::{DecayReport, Verdict};
use thermolim_core::grid::{bump, Grid1D};
use thermolim_core::propagate::{Coupling, GapProbe, MarginRule};

use super::{coupling_label, fmt_list, parse_coupling, relative_change, BoxRule};
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 13] = [
    "coupling",
    "t",
    "radius",
    "c",
    "half_width",
    "n_points",
    "gap",
    "duhamel_bound",
    "margin_required",
    "margin_ok",
    "doubled_rel_change",
    "gated",
    "local_slope",
];

#[derive(Debug, Clone)]
struct Params {
    radii: Vec<f64>,
    times: Vec<f64>,
    couplings: Vec<Coupling>,
    center: f64,
    bump_radius: f64,
    boxes: BoxRule,
    n_points: usize,
    floor: f64,
    margin: MarginRule,
    certificate: bool,
    doubling_tol: f64,
    duhamel_slack: f64,
}

impl Params {
    fn from_config(c: &Config) -> Result<Self, LabError> {
        let radii = c.ascending("radii", &[6.0, 8.0, 10.0, 12.0, 14.0])?;
        let times = c.f64_list("times", &[0.25, 0.5, 1.0])?;
        let couplings = c
            .word_list("couplings", &["1", "R"])?
            .iter()
            .map(|w| parse_coupling("couplings", w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            radii,
            times,
            couplings,
            center: c.f64("bump_center", 0.0)?,
            bump_radius: c.positive("bump_radius", 2.0)?,
            boxes: BoxRule::from_config(c, 2.0, 16.0)?,
            n_points: c.usize("n_points", 4096)?,
            floor: c.f64("floor", 1e-14)?,
            margin: MarginRule {
                base: c.f64("margin_base", 16.0)?,
                velocity_factor: c.f64("margin_velocity", 4.0)?,
                quantile: c.positive("margin_quantile", 0.99999)?,
            },
            certificate: c.bool("doubling_certificate", true)?,
            doubling_tol: c.positive("doubling_tol", 1e-4)?,
            duhamel_slack: c.f64("duhamel_slack", 1e-8)?,
        })
    }
}

#[derive(Debug, Clone)]
struct Row {
    t: f64,
    radius: f64,
    c: f64,
    half_width: f64,
    n_points: usize,
    gap: f64,
    duhamel: f64,
    margin_required: f64,
    margin_ok: bool,
    doubled_rel_change: f64,
    gated: bool,
}

/// All times for one `(coupling, R)`; the box-doubled probe is built only if
/// some time fails the margin rule.
fn scan_point(p: &Params, coupling: Coupling, radius: f64) -> Result<Vec<Row>, LabError> {
    let half_width = p.boxes.half_width(radius);
    let grid = Grid1D::new(half_width, p.n_points)?;
    let f = bump(p.center, p.bump_radius, &grid)?;
    let c = coupling.at(radius);
    let probe = GapProbe::new(&f, radius, c)?;
    let mut doubled: Option<GapProbe> = None;
    let mut rows = Vec::with_capacity(p.times.len());
    for &t in &p.times {
        let margin = p.margin.check(&f, t, radius);
        let gap = probe.gap(t)?;
        let duhamel = probe.duhamel_bound(t)?;
        let mut doubled_rel_change = f64::NAN;
        if !margin.passed() && p.certificate {
            if doubled.is_none() {
                let big = Grid1D::new(2.0 * half_width, 2 * p.n_points)?;
                doubled = Some(GapProbe::new(&bump(p.center, p.bump_radius, &big)?, radius, c)?);
            }
            let reference = doubled.as_ref().map(|d| d.gap(t)).transpose()?.unwrap_or(f64::NAN);
            doubled_rel_change =
                if (gap - reference).abs() <= p.floor { 0.0 } else { relative_change(gap, reference) };
        }
        let gated = margin.passed() || doubled_rel_change <= p.doubling_tol;
        rows.push(Row {
            t,
            radius,
            c,
            half_width,
            n_points: p.n_points,
            gap,
            duhamel,
            margin_required: margin.required,
            margin_ok: margin.passed(),
            doubled_rel_change,
            gated,
        });
    }
    Ok(rows)
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let p = Params::from_config(config)?;
    let mut report = Report::new("lemma31", config.finish()?);

    let points: Vec<(usize, f64)> =
        (0..p.couplings.len()).flat_map(|ci| p.radii.iter().map(move |&r| (ci, r))).collect();
    let results: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&(ci, r)| scan_point(&p, p.couplings[ci], r))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new("gaps", &COLUMNS);
    for (ci, coupling) in p.couplings.iter().enumerate() {
        let label = coupling_label(coupling);
        for (ti, &t) in p.times.iter().enumerate() {
            let rows: Vec<&Row> = points
                .iter()
                .zip(&results)
                .filter(|((c, _), _)| *c == ci)
                .map(|(_, rs)| &rs[ti])
                .collect();
            let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
            let decay = DecayReport::analyze(&p.radii, &gaps, p.floor, true);
            for (row, d) in rows.iter().zip(&decay.rows) {
                table.push(vec![
                    label.clone().into(),
                    row.t.into(),
                    row.radius.into(),
                    row.c.into(),
                    row.half_width.into(),
                    row.n_points.into(),
                    row.gap.into(),
                    row.duhamel.into(),
                    row.margin_required.into(),
                    row.margin_ok.into(),
                    row.doubled_rel_change.into(),
                    row.gated.into(),
                    d.slope.unwrap_or(f64::NAN).into(),
                ]);
            }

            let all_gated = rows.iter().all(|r| r.gated);
            let slopes: Vec<f64> = decay.rows.iter().filter_map(|r| r.slope).collect();
            report.checks.push(Check::gated(
                format!("decay c={label} t={t}"),
                all_gated,
                decay.verdict,
                format!("{}; gaps {}; slopes {}", decay.reason, fmt_list(&gaps), fmt_list(&slopes)),
            ));

            let gated: Vec<&&Row> = rows.iter().filter(|r| r.gated).collect();
            let worst = gated.iter().map(|r| r.gap - r.duhamel).fold(f64::NEG_INFINITY, f64::max);
            let verdict = if gated.is_empty() {
                Verdict::InvalidGate
            } else if worst <= p.duhamel_slack {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            report.checks.push(Check::new(
                format!("duhamel c={label} t={t}"),
                verdict,
                if gated.is_empty() {
                    "no run passed the margin rule or the L-doubling certificate".to_string()
                } else {
                    format!("{} gated runs; max(gap - bound) = {worst:.3e}", gated.len())
                },
            ));
        }
    }
    report.tables.push(table);
    Ok(report)
}
