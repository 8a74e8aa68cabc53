//! Flat `key = value` experiment configuration.
//!
//! One entry per line, `#` starts a comment, lists are comma-separated. Every
//! key an experiment reads is recorded together with its resolved value (the
//! default when absent) so reports can echo the complete configuration.

use std::sync::{Mutex, MutexGuard};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("key `{0}` is given twice")]
    Duplicate(String),

    #[error("key `{key}` = `{value}`: {reason}")]
    Invalid { key: String, value: String, reason: String },

    #[error("unknown keys for this subcommand: {}", .0.join(", "))]
    Unknown(Vec<String>),

    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type Result<T> = std::result::Result<T, ConfigError>;

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    resolved: Mutex<Vec<(String, String)>>,
    seen: Mutex<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ConfigError::Syntax { line: i + 1, message: format!("invalid key `{key}`") });
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(ConfigError::Duplicate(key.to_string()));
            }
        }
        Ok(Self { entries, ..Self::default() })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Overrides (or adds) an entry, as the CLI does for `--seed`.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    fn record(&self, key: &str, value: String) {
        let mut resolved = lock(&self.resolved);
        if !resolved.iter().any(|(k, _)| k == key) {
            resolved.push((key.to_string(), value));
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        lock(&self.seen).insert(key.to_string());
        self.entries.get(key).map(String::as_str)
    }

    fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key: key.to_string(), value: value.to_string(), reason: reason.into() }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        let value = match self.raw(key) {
            Some(v) => parse_f64(key, v)?,
            None => default,
        };
        self.record(key, fmt_f64(value));
        Ok(value)
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key, default)?;
        if !(v > 0.0) {
            return Err(Self::invalid(key, &fmt_f64(v), "must be positive"));
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        let value = match self.raw(key) {
            Some(v) => v.parse().map_err(|_| Self::invalid(key, v, "expected a non-negative integer"))?,
            None => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        let value = match self.raw(key) {
            Some(v) => v.parse().map_err(|_| Self::invalid(key, v, "expected a non-negative integer"))?,
            None => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        let value = match self.raw(key) {
            Some("true") => true,
            Some("false") => false,
            Some(v) => return Err(Self::invalid(key, v, "expected `true` or `false`")),
            None => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    /// A non-empty comma-separated list of numbers.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let value = match self.raw(key) {
            Some(v) => self.words(key, v)?.iter().map(|w| parse_f64(key, w)).collect::<Result<Vec<_>>>()?,
            None => default.to_vec(),
        };
        self.record(key, value.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(", "));
        Ok(value)
    }

    /// Like [`Config::f64_list`], additionally requiring strictly ascending values.
    pub fn ascending(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.f64_list(key, default)?;
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Self::invalid(key, &join(&v), "values must strictly ascend"));
        }
        Ok(v)
    }

    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let value = match self.raw(key) {
            Some(v) => self
                .words(key, v)?
                .iter()
                .map(|w| w.parse().map_err(|_| Self::invalid(key, w, "expected a non-negative integer")))
                .collect::<Result<Vec<_>>>()?,
            None => default.to_vec(),
        };
        self.record(key, value.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
        Ok(value)
    }

    pub fn word_list(&self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        let value = match self.raw(key) {
            Some(v) => self.words(key, v)?.into_iter().map(str::to_string).collect(),
            None => default.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        };
        self.record(key, value.join(", "));
        Ok(value)
    }

    fn words<'a>(&self, key: &str, v: &'a str) -> Result<Vec<&'a str>> {
        let words: Vec<&str> = v.split(',').map(str::trim).collect();
        if v.trim().is_empty() || words.iter().any(|w| w.is_empty()) {
            return Err(Self::invalid(key, v, "expected a non-empty comma-separated list"));
        }
        Ok(words)
    }

    /// Rejects keys that were never read and returns the resolved entries in
    /// the order they were read.
    pub fn finish(&self) -> Result<Vec<(String, String)>> {
        let resolved = lock(&self.resolved);
        let seen = lock(&self.seen);
        let unknown: Vec<String> = self.entries.keys().filter(|k| !seen.contains(*k)).cloned().collect();
        if !unknown.is_empty() {
            return Err(ConfigError::Unknown(unknown));
        }
        Ok(resolved.clone())
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Config::invalid(key, v, "expected a finite number")),
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let c = Config::parse("# scan\nradii = 6, 8,10\nbeta=2 # inline\n\n").unwrap();
        assert_eq!(c.f64_list("radii", &[]).unwrap(), vec![6.0, 8.0, 10.0]);
        assert_eq!(c.f64("beta", 1.0).unwrap(), 2.0);
        assert_eq!(c.f64("mu", -1.0).unwrap(), -1.0);
        let echo = c.finish().unwrap();
        assert_eq!(echo[0], ("radii".into(), "6.0, 8.0, 10.0".into()));
        assert_eq!(echo[2], ("mu".into(), "-1.0".into()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::parse("a = 1\na = 2"), Err(ConfigError::Duplicate(_))));
        assert!(matches!(Config::parse("no separator"), Err(ConfigError::Syntax { line: 1, .. })));
        let c = Config::parse("radii =\nflag = yes\nextra = 1").unwrap();
        assert!(c.f64_list("radii", &[1.0]).is_err());
        assert!(c.bool("flag", false).is_err());
        assert!(matches!(c.finish(), Err(ConfigError::Unknown(k)) if k == ["extra"]));
        let c = Config::parse("radii = 3, 2").unwrap();
        assert!(c.ascending("radii", &[]).is_err());
    }
}
