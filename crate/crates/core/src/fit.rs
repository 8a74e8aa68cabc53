//! Log–log slope fitting and decay verdicts for sequences of positive values.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Outcome of an experiment check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Too many values sit at or below the numerical floor to judge the trend.
    InconclusiveFloor,
    /// The input is trivial (identically zero), so there is nothing to decay.
    Trivial,
    /// A validity gate rejected the run before it was judged.
    InvalidGate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::InconclusiveFloor => "inconclusive-floor",
            Verdict::Trivial => "trivial",
            Verdict::InvalidGate => "invalid-gate",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Trivial)
    }
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len().min(ys.len()) as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Slopes `Δ ln y / Δ ln x` between consecutive points.
pub fn local_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1].ln() - y[0].ln()) / (x[1].ln() - x[0].ln()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub x: f64,
    pub value: f64,
    /// Local slope to the previous row, when both rows are above the floor.
    pub slope: Option<f64>,
    pub below_floor: bool,
}

/// A decay table together with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub verdict: Verdict,
    pub reason: &'static str,
}

impl DecayReport {
    pub const DEFAULT_FLOOR: f64 = 1e-14;

    /// Judge `values` sampled at increasing `xs`.
    ///
    /// Passes when the values above `floor` strictly decrease and, if
    /// `accelerating`, the local log–log slopes are negative with nondecreasing
    /// magnitudes.
    pub fn analyze(xs: &[f64], values: &[f64], floor: f64, accelerating: bool) -> DecayReport {
        let mut rows: Vec<DecayRow> = xs
            .iter()
            .zip(values)
            .map(|(&x, &value)| DecayRow { x, value, slope: None, below_floor: value <= floor })
            .collect();
        if values.iter().all(|v| *v == 0.0) {
            return DecayReport { rows, verdict: Verdict::Trivial, reason: "identically zero" };
        }
        let usable = rows.iter().take_while(|r| !r.below_floor).count();
        for i in 1..usable {
            let (a, b) = (&rows[i - 1], &rows[i]);
            let s = (b.value.ln() - a.value.ln()) / (b.x.ln() - a.x.ln());
            rows[i].slope = Some(s);
        }
        let needed = if accelerating { 3 } else { 2 };
        if usable < needed {
            return DecayReport { rows, verdict: Verdict::InconclusiveFloor, reason: "values reach the floor" };
        }
        let decreasing = rows[..usable].windows(2).all(|w| w[1].value < w[0].value);
        if !decreasing {
            return DecayReport { rows, verdict: Verdict::Fail, reason: "not strictly decreasing" };
        }
        if accelerating {
            let slopes: Vec<f64> = rows[1..usable].iter().filter_map(|r| r.slope).collect();
            if slopes.iter().any(|s| *s >= 0.0) || !slopes.windows(2).all(|w| w[1].abs() >= w[0].abs()) {
                return DecayReport { rows, verdict: Verdict::Fail, reason: "slope magnitudes decrease" };
            }
        }
        DecayReport { rows, verdict: Verdict::Pass, reason: "decay signature holds" }
    }
}
