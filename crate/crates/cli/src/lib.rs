//! Command-line experiment runner for `bellman-lab`.
//!
//! Every subcommand is a `module op` pair with a typed parameter schema
//! (see [`commands`]). A run resolves its [`ExperimentConfig`] against the
//! schema, dispatches to the library, and returns a [`RunReport`] whose
//! checks carry declared tolerances.

pub mod anchors;
pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suite;

use std::time::Instant;

pub use config::{ExperimentConfig, Format};
pub use error::CliError;
pub use report::{Check, RunReport, Status};

use report::{overall, ConfigEcho};

pub fn version() -> String {
    format!("bellman-lab {}", env!("CARGO_PKG_VERSION"))
}

/// Runs `cfg.command` and writes the rendered report to `cfg.output` when set.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut words = cfg.command.split_whitespace();
    let (checks, table, data, params) = if words.next() == Some("suite") {
        let name = words.next().unwrap_or_default();
        if words.next().is_some() {
            return Err(CliError::UnknownCommand(cfg.command.clone()));
        }
        let out = suite::run(name, cfg)?;
        let mut data = std::collections::BTreeMap::new();
        data.insert("entries".to_string(), suite::describe(&suite::entries(name)?));
        if !out.errors.is_empty() {
            data.insert("errors".to_string(), out.errors.into());
        }
        let mut params = std::collections::BTreeMap::new();
        params.insert("disable".to_string(), cfg.disable.join(","));
        (out.checks, Some(out.table), data, params)
    } else {
        let resolved = cfg.resolve()?;
        let spec = commands::find(&cfg.command).expect("resolve checked the command");
        let out = (spec.run)(&resolved)?;
        (out.checks, out.table, out.data, resolved.echo)
    };
    let report = RunReport {
        version: version(),
        config: ConfigEcho { command: cfg.command.clone(), seed: cfg.seed, format: cfg.format.to_string(), params },
        status: overall(&checks),
        checks,
        table,
        data,
        wall_seconds: cfg.timing.then(|| start.elapsed().as_secs_f64()),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, report.render(cfg.format)?)?;
    }
    Ok(report)
}

/// 0 pass, 1 failed check, 3 if a suite entry hit a module error.
pub fn exit_status(report: &RunReport) -> i32 {
    if report.data.contains_key("errors") {
        3
    } else if report.passed() {
        0
    } else {
        1
    }
}
