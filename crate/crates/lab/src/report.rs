//! Experiment reports: CSV tables with the resolved configuration in a comment
//! header, plus a JSON summary of the verdicts.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thermolim_core::fit::Verdict;

use crate::config::fmt_f64;

/// Bumped whenever a subcommand's CSV columns change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) if v.is_nan() => String::new(),
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(v) => Some(*v),
            Cell::I(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    /// Values of one numeric column, `None` for non-numeric cells.
    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let Some(i) = self.columns.iter().position(|c| *c == name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }
}

/// One judged claim of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self { name: name.into(), verdict, detail: detail.into() }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(name, if ok { Verdict::Pass } else { Verdict::Fail }, detail)
    }

    /// A check whose inputs passed every validity gate only if `gated`.
    pub fn gated(name: impl Into<String>, gated: bool, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self::new(name, if gated { verdict } else { Verdict::InvalidGate }, detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    InvalidGate,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::InvalidGate => "invalid-gate",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::InvalidGate => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub subcommand: &'static str,
    pub config: Vec<(String, String)>,
    /// The first table is written as `<subcommand>.csv`, the rest as
    /// `<subcommand>_<name>.csv`.
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Reported, not judged: oracle deltas, fitted constants and the like.
    pub metrics: Vec<(String, f64)>,
}

impl Report {
    pub fn new(subcommand: &'static str, config: Vec<(String, String)>) -> Self {
        Self { subcommand, config, tables: Vec::new(), checks: Vec::new(), metrics: Vec::new() }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push((name.into(), value));
    }

    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.verdict == Verdict::InvalidGate) {
            Status::InvalidGate
        } else if self.checks.iter().all(|c| c.verdict.is_pass()) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn checks_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn get_metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn file_name(&self, index: usize) -> String {
        if index == 0 {
            format!("{}.csv", self.subcommand)
        } else {
            format!("{}_{}.csv", self.subcommand, self.tables[index].name)
        }
    }

    pub fn csv(&self, index: usize) -> String {
        let table = &self.tables[index];
        let mut out = String::new();
        let _ = writeln!(out, "# thermolim {} table={} schema={}", self.subcommand, table.name, SCHEMA_VERSION);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", table.columns.join(","));
        for row in &table.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let metrics: Map<String, Value> = self
            .metrics
            .iter()
            .map(|(k, v)| (k.clone(), if v.is_finite() { json!(v) } else { Value::Null }))
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "verdict": c.verdict.as_str(), "detail": c.detail }))
            .collect();
        let tables: Vec<Value> = (0..self.tables.len()).map(|i| Value::from(self.file_name(i))).collect();
        json!({
            "subcommand": self.subcommand,
            "schema": SCHEMA_VERSION,
            "status": self.status().as_str(),
            "exit_code": self.status().exit_code(),
            "config": config,
            "checks": checks,
            "metrics": metrics,
            "tables": tables,
        })
    }

    /// Writes every table and the JSON summary into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for i in 0..self.tables.len() {
            let path = dir.join(self.file_name(i));
            std::fs::write(&path, self.csv(i))?;
            written.push(path);
        }
        let path = dir.join(format!("{}.json", self.subcommand));
        let mut text = serde_json::to_string_pretty(&self.to_json()).map_err(io::Error::other)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(written)
    }
}
