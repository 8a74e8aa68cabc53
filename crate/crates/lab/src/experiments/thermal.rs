//! Interior density of trapped thermal clouds against the homogeneous value.

use rayon::prelude::*;
use thermolim_core::fit::Verdict;
use thermolim_core::hamiltonian::{assemble, PotentialSpec};
use thermolim_core::quasifree::homogeneous_density;
use thermolim_core::{Grid1D, QuasifreeState, ThermalCloud};

use super::{fmt_list, parse_coupling};
use crate::config::Config;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub const COLUMNS: [&str; 11] = [
    "radius",
    "half_width",
    "n_points",
    "modes",
    "energy_cutoff",
    "x",
    "density",
    "homogeneous",
    "rel_deviation",
    "max_edge_amplitude",
    "gated",
];

struct Params {
    beta: f64,
    mu: f64,
    coupling: thermolim_core::propagate::Coupling,
    radii: Vec<f64>,
    box_pad: f64,
    max_dx: f64,
    x: f64,
    occupation_cutoff: f64,
    tolerance: f64,
    resolution: f64,
    edge_tol: f64,
}

struct Row {
    radius: f64,
    grid: Grid1D,
    modes: usize,
    cutoff: f64,
    density: f64,
    max_edge: f64,
}

fn trap(p: &Params, radius: f64) -> Result<Row, LabError> {
    let grid = Grid1D::with_spacing(radius + p.box_pad, p.max_dx)?;
    let cutoff = p.mu + (1.0 / p.occupation_cutoff).ln_1p() / p.beta;
    let h = assemble(&grid, &PotentialSpec::truncated_harmonic(radius, p.coupling.at(radius)))?;
    let d = h.below(cutoff)?;
    let max_edge = (0..d.len()).map(|k| d.edge_amplitude(k)).fold(0.0, f64::max);
    let modes = d.len();
    let state = QuasifreeState::new(p.beta, p.mu, ThermalCloud::Trapped(d), None)?;
    Ok(Row { radius, grid, modes, cutoff, density: state.thermal_density(p.x)?, max_edge })
}

pub fn run(config: &Config) -> Result<Report, LabError> {
    let c = config;
    let p = Params {
        beta: c.positive("beta", 1.0)?,
        mu: c.f64("mu", -1.0)?,
        coupling: parse_coupling("coupling", &c.word_list("coupling", &["1"])?[0])?,
        radii: c.ascending("radii", &[20.0, 40.0, 80.0])?,
        box_pad: c.positive("box_pad", 8.0)?,
        max_dx: c.positive("max_dx", 0.05)?,
        x: c.f64("x", 0.0)?,
        occupation_cutoff: c.positive("occupation_cutoff", 1e-14)?,
        tolerance: c.positive("tolerance", 0.01)?,
        resolution: c.positive("resolution", 1e-12)?,
        edge_tol: c.positive("edge_tol", 1e-8)?,
    };
    let mut report = Report::new("thermal", config.finish()?);
    let homogeneous = homogeneous_density(p.beta, p.mu, 1)?;
    let rows: Vec<Row> = p.radii.par_iter().map(|&r| trap(&p, r)).collect::<Result<_, _>>()?;

    let mut table = Table::new("density", &COLUMNS);
    let mut deviations = Vec::new();
    for r in &rows {
        let dev = r.density / homogeneous - 1.0;
        deviations.push(dev.abs());
        table.push(vec![
            r.radius.into(),
            r.grid.half_width().into(),
            r.grid.len().into(),
            r.modes.into(),
            r.cutoff.into(),
            p.x.into(),
            r.density.into(),
            homogeneous.into(),
            dev.into(),
            r.max_edge.into(),
            (r.max_edge <= p.edge_tol).into(),
        ]);
    }
    report.tables.push(table);
    report.metric("homogeneous_density", homogeneous);

    let gated = rows.iter().all(|r| r.max_edge <= p.edge_tol);
    let last = *deviations.last().unwrap_or(&f64::INFINITY);
    report.checks.push(Check::gated(
        "convergence",
        gated,
        if last <= p.tolerance { Verdict::Pass } else { Verdict::Fail },
        format!("relative deviation {last:.3e} at the largest radius"),
    ));
    // steps below the resolution are roundoff, not convergence
    let densities: Vec<f64> = rows.iter().map(|r| r.density).collect();
    let resolved = densities.windows(2).all(|w| (w[1] - w[0]).abs() > p.resolution * w[0].abs());
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    let verdict = match (monotone, resolved) {
        (true, true) => Verdict::Pass,
        (false, true) => Verdict::Fail,
        (_, false) => Verdict::InconclusiveFloor,
    };
    let steps: Vec<f64> = densities.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    report.checks.push(Check::gated(
        "monotone deviation",
        gated,
        verdict,
        format!("|deviations| {}; relative density steps {}", fmt_list(&deviations), fmt_list(&steps)),
    ));
    Ok(report)
}
