//! Curated batteries run by `suite fast` and `suite full`.

use rayon::prelude::*;
use serde_json::json;

use crate::anchors;
use crate::commands;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{Check, Status, Table};

/// Environment variable with the default worker count.
pub const WORKERS_ENV: &str = "BELLMAN_LAB_WORKERS";

pub struct Entry {
    /// Unique, sorts in criterion order.
    pub name: &'static str,
    pub command: &'static str,
    pub params: &'static [(&'static str, &'static str)],
}

const fn e(name: &'static str, command: &'static str, params: &'static [(&'static str, &'static str)]) -> Entry {
    Entry { name, command, params }
}

const SHARED: &[Entry] = &[
    e("01-laminate-limit", "laminate sweep", &[("p", "3")]),
    e("01-laminate-jensen-nu", "laminate check", &[("which", "nu")]),
    e("02-tau-scan", "bellman tau-scan", &[]),
    e("02-interpolation-sup", "bellman interp-sweep", &[]),
    e("03-hessian-p3", "bellman hessian", &[("p", "3")]),
    e("03-section-p4", "bellman section", &[("p", "4")]),
    e("03-majorant-p2", "bellman majorant", &[("p", "2")]),
    e("03-majorant-p2.5", "bellman majorant", &[("p", "2.5")]),
    e("03-majorant-p3", "bellman majorant", &[("p", "3")]),
    e("03-majorant-p5", "bellman majorant", &[("p", "5")]),
    e("03-majorant-p8", "bellman majorant", &[("p", "8")]),
    e("03-power", "bellman power", &[]),
    e("03-zigzag-p2", "bellman zigzag", &[("p", "2")]),
    e("03-zigzag-p2.5", "bellman zigzag", &[("p", "2.5")]),
    e("03-zigzag-p3", "bellman zigzag", &[("p", "3")]),
    e("03-zigzag-p5", "bellman zigzag", &[("p", "5")]),
    e("03-zigzag-p8", "bellman zigzag", &[("p", "8")]),
    e("04-transition-p2.5", "bellman transition", &[("p", "2.5")]),
    e("04-transition-p3", "bellman transition", &[("p", "3")]),
    e("04-transition-p4", "bellman transition", &[("p", "4")]),
    e("05-identity-heat", "planar identity113", &[]),
    e("05-spectral", "planar spectral", &[]),
    e("07-buckley", "dyadic buckley", &[]),
    e("07-carleson", "dyadic carleson", &[]),
    e("07-haar", "dyadic haar", &[]),
    e("08-conformal", "stoch conformal", &[]),
    e("08-isometry", "stoch isometry", &[]),
    e("08-riemann-gap", "stoch riemann-gap", &[]),
    e("09-jn-0.1", "bellman jn", &[("delta", "0.1")]),
    e("09-jn-0.25", "bellman jn", &[("delta", "0.25")]),
    e("10-distortion-K1.5", "qc distortion", &[("K", "1.5")]),
    e("10-distortion-K2", "qc distortion", &[("K", "2")]),
    e("10-distortion-K3", "qc distortion", &[("K", "3")]),
    e("10-threshold-K1.5", "qc threshold", &[("K", "1.5")]),
    e("10-threshold-K2", "qc threshold", &[("K", "2")]),
    e("10-threshold-K3", "qc threshold", &[("K", "3")]),
    e("10-weight-growth-K2", "qc weight-growth", &[("K", "2"), ("n", "256")]),
];

const FULL: &[Entry] = &[
    e("06-norm-ascent", "planar norm-ascent", &[]),
    e("08-ab-conditioning", "stoch ab-mc", &[]),
    e("08-constants-p4", "stoch constants", &[("p", "4")]),
];

const FAST: &[Entry] = &[
    e("06-norm-ascent", "planar norm-ascent", &[("n", "64"), ("iters", "60")]),
    e("08-ab-conditioning", "stoch ab-mc", &[("paths", "2e5"), ("bins", "16"), ("n", "256"), ("steps", "200")]),
    e("08-constants-p4", "stoch constants", &[("p", "4"), ("trials", "2000"), ("functions", "3")]),
];

/// Entries of a suite in name order.
pub fn entries(name: &str) -> Result<Vec<&'static Entry>, CliError> {
    let extra = match name {
        "fast" => FAST,
        "full" => FULL,
        _ => return Err(CliError::UnknownCommand(format!("suite {name}"))),
    };
    let mut v: Vec<_> = SHARED.iter().chain(extra).collect();
    v.sort_by_key(|e| e.name);
    Ok(v)
}

fn module(e: &Entry) -> &str {
    e.command.split_whitespace().next().unwrap_or_default()
}

/// Aggregated checks, a one-row-per-entry table, and the module errors.
pub struct SuiteOutcome {
    pub checks: Vec<Check>,
    pub table: Table,
    pub errors: Vec<String>,
}

fn run_entry(e: &Entry, cfg: &ExperimentConfig) -> (Vec<Check>, Option<String>) {
    if cfg.disable.iter().any(|m| m == module(e) || m == e.name) {
        return (vec![Check::skipped(&format!("{}/*", e.name), anchors::SUITE)], None);
    }
    let mut sub = ExperimentConfig::new(e.command).seeded(cfg.seed);
    for (k, v) in e.params {
        sub = sub.with(k, v);
    }
    let spec = commands::find(e.command).expect("suite entries name registered commands");
    match sub.resolve().and_then(|r| (spec.run)(&r)) {
        Ok(out) => (out.checks.into_iter().map(|c| c.prefixed(e.name)).collect(), None),
        Err(err) => (vec![Check::holds(&format!("{}/error", e.name), anchors::SUITE, false)], Some(format!("{}: {err}", e.name))),
    }
}

pub fn workers(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    if let Some(w) = cfg.workers {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(CliError::schema(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs every entry; results are merged in name order, so the report does
/// not depend on the worker count.
pub fn run(name: &str, cfg: &ExperimentConfig) -> Result<SuiteOutcome, CliError> {
    if let Some(k) = cfg.params.keys().next() {
        return Err(CliError::schema(k, "suites take no parameters"));
    }
    let list = entries(name)?;
    for m in &cfg.disable {
        if !list.iter().any(|e| module(e) == m || e.name == m) {
            return Err(CliError::schema("disable", format!("`{m}` is neither a module nor an entry of suite {name}")));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(cfg)?)
        .build()
        .map_err(|e| CliError::schema("workers", e.to_string()))?;
    let results: Vec<_> = pool.install(|| list.par_iter().map(|e| run_entry(e, cfg)).collect());
    let mut out = SuiteOutcome { checks: vec![], table: Table::new(&["entry", "command", "status", "checks"]), errors: vec![] };
    for (e, (checks, err)) in list.iter().zip(results) {
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if checks.iter().all(|c| c.status == Status::Skipped) {
            Status::Skipped
        } else {
            Status::Pass
        };
        out.table.push(vec![e.name.into(), e.command.into(), status.to_string().into(), checks.len().into()]);
        out.checks.extend(checks);
        out.errors.extend(err);
    }
    Ok(out)
}

pub(crate) fn describe(list: &[&Entry]) -> serde_json::Value {
    list.iter().map(|e| json!({ "name": e.name, "command": e.command, "params": e.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>() })).collect()
}
