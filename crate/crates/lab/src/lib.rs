//! Experiment runner: one subcommand per claim, flat-text configuration,
//! CSV + JSON reports and exit codes for CI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Config, ConfigError};
pub use experiments::{run, RunOptions, Subcommand};
pub use report::{Check, Report, Status, Table};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] thermolim_core::Error),

    #[error("worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Every error before a report exists is a gate or configuration error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
