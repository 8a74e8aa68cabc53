//! Condensates in the lowest even and odd trap modes of a 1D gas: smeared
//! mode limits, limit densities and particle-count scaling.

use rayon::prelude::*;
use thermolim_core::condensate::{condensate_count, count_exponent, smeared_mode_limit, trap_mode, TrapMode};
use thermolim_core::fit::Verdict;
use thermolim_core::grid::bump;
use thermolim_core::{Condensate, CondensateMode, Parity, QuasifreeState, ThermalCloud};

use super::{fmt_list, line_grid};
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COUNT_COLUMNS: [&str; 6] = ["parity", "radius", "n_points", "energy", "count", "edge_amplitude"];
pub const PAIRING_COLUMNS: [&str; 6] = ["parity", "radius", "energy", "pairing", "limit", "deviation"];
pub const DENSITY_COLUMNS: [&str; 6] = ["parity", "radius", "x", "condensate_density", "limit_density", "rel_deviation"];

const PARITIES: [Parity; 2] = [Parity::Even, Parity::Odd];

struct Params {
    coupling: f64,
    kappa: f64,
    beta: f64,
    mu: f64,
    box_offset: f64,
    max_dx: f64,
    n_max: usize,
    pairing_radii: Vec<f64>,
    density_radii: Vec<f64>,
    density_points: Vec<f64>,
    density_min_radius: f64,
    density_tol: f64,
    count_radii: Vec<f64>,
    exponent_tol: f64,
    slope_max: f64,
    bump_radius: f64,
    odd_center: f64,
    edge_tol: f64,
}

impl Params {
    fn grid(&self, radius: f64) -> thermolim_core::Result<thermolim_core::Grid1D> {
        line_grid(radius + self.box_offset, self.max_dx, self.n_max)
    }
}

fn target_density(parity: Parity, kappa: f64, x: f64) -> f64 {
    match parity {
        Parity::Even => kappa * kappa,
        Parity::Odd => kappa * kappa * x * x,
    }
}

fn mode_at(p: &Params, radius: f64, parity: Parity) -> Result<TrapMode, LabError> {
    Ok(trap_mode(&p.grid(radius)?, radius, p.coupling, parity)?)
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let p = Params {
        coupling: c.positive("coupling", 1.0)?,
        kappa: c.f64("kappa", 0.5)?,
        beta: c.positive("beta", 1.0)?,
        mu: c.f64("mu", -1.0)?,
        box_offset: c.positive("box_offset", 16.0)?,
        max_dx: c.positive("max_dx", 0.05)?,
        n_max: c.usize("n_max", 8192)?,
        pairing_radii: c.ascending("pairing_radii", &[10.0, 20.0, 40.0, 80.0])?,
        density_radii: c.ascending("density_radii", &[40.0, 80.0, 160.0])?,
        density_points: c.f64_list("density_points", &[1.0, 2.0, 4.0])?,
        density_min_radius: c.f64("density_min_radius", 40.0)?,
        density_tol: c.positive("density_tol", 0.02)?,
        count_radii: c.ascending("count_radii", &[20.0, 40.0, 80.0, 160.0])?,
        exponent_tol: c.positive("exponent_tol", 0.1)?,
        slope_max: c.f64("slope_max", -1.7)?,
        bump_radius: c.positive("bump_radius", 1.0)?,
        odd_center: c.f64("odd_center", 3.0)?,
        edge_tol: c.positive("edge_tol", 1e-8)?,
    };
    if p.density_points.contains(&0.0) {
        return Err(crate::ConfigError::Invalid {
            key: "density_points".into(),
            value: "0".into(),
            reason: "the odd limit density vanishes at the origin".into(),
        }
        .into());
    }
    let mut report = Report::new("condensate1d", config.finish()?);

    // every mode once, so the edge gate covers all radii
    let mut radii: Vec<f64> = p.count_radii.iter().chain(&p.density_radii).chain(&p.pairing_radii).copied().collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let jobs: Vec<(f64, Parity)> = radii.iter().flat_map(|&r| PARITIES.map(|q| (r, q))).collect();
    let modes: Vec<TrapMode> = jobs.par_iter().map(|&(r, q)| mode_at(&p, r, q)).collect::<Result<_, _>>()?;
    let mode = |r: f64, q: Parity| &modes[jobs.iter().position(|j| *j == (r, q)).unwrap_or(0)];
    let edges_ok = modes.iter().all(|m| m.edge_amplitude <= p.edge_tol);

    let mut counts_table = Table::new("counts", &COUNT_COLUMNS);
    for q in PARITIES {
        let counts: Vec<f64> =
            p.count_radii.iter().map(|&r| condensate_count(q, p.kappa, r, mode(r, q).energy)).collect();
        for (&r, n) in p.count_radii.iter().zip(&counts) {
            let m = mode(r, q);
            counts_table.push(vec![
                q.as_str().into(),
                r.into(),
                m.mode.grid().len().into(),
                m.energy.into(),
                (*n).into(),
                m.edge_amplitude.into(),
            ]);
        }
        let expected = match q {
            Parity::Even => 1.0,
            Parity::Odd => 3.0,
        };
        let check = match count_exponent(&p.count_radii, &counts) {
            None => Check::new(format!("{} count exponent", q.as_str()), Verdict::Trivial, "κ = 0: no condensate"),
            Some(e) => Check::gated(
                format!("{} count exponent", q.as_str()),
                edges_ok,
                if (e - expected).abs() <= p.exponent_tol { Verdict::Pass } else { Verdict::Fail },
                format!("fitted exponent {e:.4} (expected {expected} ± {})", p.exponent_tol),
            ),
        };
        report.checks.push(check);
        if let Some(e) = count_exponent(&p.count_radii, &counts) {
            report.metric(format!("{}_count_exponent", q.as_str()), e);
        }
    }
    for &r in &p.count_radii {
        report.metric(format!("even_energy_r2_at_{r}"), mode(r, Parity::Even).energy * r * r);
    }
    report.tables.push(counts_table);

    let scans = PARITIES
        .par_iter()
        .map(|&q| {
            let center = if q == Parity::Even { 0.0 } else { p.odd_center };
            smeared_mode_limit(q, p.coupling, &p.pairing_radii, |r| p.grid(r), |g| {
                bump(center, p.bump_radius, g)?.with_unit_integral()
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut pairings = Table::new("pairings", &PAIRING_COLUMNS);
    for scan in &scans {
        for row in &scan.rows {
            pairings.push(vec![
                scan.parity.as_str().into(),
                row.radius.into(),
                row.energy.into(),
                row.pairing.into(),
                row.limit.into(),
                row.deviation.into(),
            ]);
        }
        let deviations: Vec<f64> = scan.rows.iter().map(|r| r.deviation).collect();
        let (verdict, slope) = match scan.slope {
            Some(s) => (if s <= p.slope_max { Verdict::Pass } else { Verdict::Fail }, s),
            None => (Verdict::InconclusiveFloor, f64::NAN),
        };
        report.checks.push(Check::gated(
            format!("{} pairing slope", scan.parity.as_str()),
            edges_ok,
            verdict,
            format!("slope {slope:.3}; deviations {}", fmt_list(&deviations)),
        ));
    }
    report.tables.push(pairings);

    let mut density = Table::new("density", &DENSITY_COLUMNS);
    for q in PARITIES {
        let mut worst = 0.0f64;
        for &r in &p.density_radii {
            let m = mode(r, q);
            let state = QuasifreeState::new(
                p.beta,
                p.mu,
                ThermalCloud::Homogeneous { dimension: 1 },
                Some(Condensate::new(p.kappa, CondensateMode::Grid(m.mode.clone()))?),
            )?;
            for &x in &p.density_points {
                let value = state.position_density(x)? - state.thermal_density(x)?;
                let target = target_density(q, p.kappa, x);
                let dev = value / target - 1.0;
                if r >= p.density_min_radius {
                    worst = worst.max(dev.abs());
                }
                density.push(vec![q.as_str().into(), r.into(), x.into(), value.into(), target.into(), dev.into()]);
            }
        }
        let name = format!("{} limit density", q.as_str());
        report.checks.push(if p.kappa == 0.0 {
            Check::new(name, Verdict::Trivial, "κ = 0: no condensate density")
        } else {
            Check::gated(
                name,
                edges_ok,
                if worst <= p.density_tol { Verdict::Pass } else { Verdict::Fail },
                format!("max relative deviation {worst:.3e} for R ≥ {}", p.density_min_radius),
            )
        });
    }
    report.tables.push(density);
    Ok(report)
}
