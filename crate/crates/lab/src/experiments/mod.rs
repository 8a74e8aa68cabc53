//! The subcommands. Each reads its keys from the [`Config`], runs its scan
//! points on the ambient rayon pool and assembles the report in input order.

use thermolim_core::grid::Grid1D;
use thermolim_core::propagate::Coupling;

use crate::config::{Config, ConfigError};
use crate::report::Report;
use crate::LabError;

pub mod condensate1d;
pub mod condensate3d;
pub mod lemma31;
pub mod lemma33;
pub mod memory;
pub mod mulimit;
pub mod oracle;
pub mod resolvent;
pub mod thermal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Lemma31,
    Lemma33,
    Thermal,
    Resolvent,
    Condensate1d,
    Mulimit,
    Condensate3d,
    Memory,
    Oracle,
}

impl Subcommand {
    pub const ALL: [Subcommand; 9] = [
        Subcommand::Lemma31,
        Subcommand::Lemma33,
        Subcommand::Thermal,
        Subcommand::Resolvent,
        Subcommand::Condensate1d,
        Subcommand::Mulimit,
        Subcommand::Condensate3d,
        Subcommand::Memory,
        Subcommand::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Lemma31 => "lemma31",
            Subcommand::Lemma33 => "lemma33",
            Subcommand::Thermal => "thermal",
            Subcommand::Resolvent => "resolvent",
            Subcommand::Condensate1d => "condensate1d",
            Subcommand::Mulimit => "mulimit",
            Subcommand::Condensate3d => "condensate3d",
            Subcommand::Memory => "memory",
            Subcommand::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Overrides the `seed` key of the configuration.
    pub seed: Option<u64>,
}

pub fn run(subcommand: Subcommand, config: &Config, options: RunOptions) -> Result<Report, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| LabError::Pool(e.to_string()))?;
    pool.install(|| match subcommand {
        Subcommand::Lemma31 => lemma31::run(config),
        Subcommand::Lemma33 => lemma33::run(config, options.seed),
        Subcommand::Thermal => thermal::run(config),
        Subcommand::Resolvent => resolvent::run(config),
        Subcommand::Condensate1d => condensate1d::run(config),
        Subcommand::Mulimit => mulimit::run(config),
        Subcommand::Condensate3d => condensate3d::run(config),
        Subcommand::Memory => memory::run(config),
        Subcommand::Oracle => oracle::run(config, options.seed),
    })
}

/// Trap coupling from a config word: a number for a constant, `R`, `R^a` or
/// `s*R^a` for a power of the radius.
pub fn parse_coupling(key: &str, word: &str) -> Result<Coupling, ConfigError> {
    let invalid = |reason: &str| ConfigError::Invalid { key: key.into(), value: word.into(), reason: reason.into() };
    if let Ok(c) = word.parse::<f64>() {
        return if c.is_finite() && c >= 0.0 { Ok(Coupling::Constant(c)) } else { Err(invalid("negative coupling")) };
    }
    let (scale, power) = match word.split_once('*') {
        Some((s, p)) => (s.trim().parse::<f64>().map_err(|_| invalid("bad scale"))?, p.trim()),
        None => (1.0, word),
    };
    let exponent = match power.strip_prefix('R') {
        Some("") => 1.0,
        Some(rest) => rest.strip_prefix('^').and_then(|e| e.parse::<f64>().ok()).ok_or_else(|| invalid("bad exponent"))?,
        None => return Err(invalid("expected a number, `R`, `R^a` or `s*R^a`")),
    };
    Coupling::power(scale, exponent).map_err(|e| invalid(&e.to_string()))
}

pub fn coupling_label(c: &Coupling) -> String {
    match *c {
        Coupling::Constant(v) => format!("{v}"),
        Coupling::Power { scale, exponent } if scale == 1.0 && exponent == 1.0 => "R".into(),
        Coupling::Power { scale, exponent } => format!("{scale}*R^{exponent}"),
    }
}

/// `L = scale·R + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRule {
    pub scale: f64,
    pub offset: f64,
}

impl BoxRule {
    pub fn from_config(config: &Config, scale: f64, offset: f64) -> Result<Self, ConfigError> {
        Ok(Self { scale: config.f64("box_scale", scale)?, offset: config.f64("box_offset", offset)? })
    }

    pub fn half_width(&self, radius: f64) -> f64 {
        self.scale * radius + self.offset
    }
}

/// Grid with spacing at most `max_dx`, unless that needs more than `n_max`
/// points, in which case `n_max` points are used.
pub fn line_grid(half_width: f64, max_dx: f64, n_max: usize) -> thermolim_core::Result<Grid1D> {
    let g = Grid1D::with_spacing(half_width, max_dx)?;
    if g.len() > n_max {
        Grid1D::new(half_width, n_max - n_max % 2)
    } else {
        Ok(g)
    }
}

/// Relative change `|a - b| / |b|`, or the absolute change when `b = 0`.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub(crate) fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}
