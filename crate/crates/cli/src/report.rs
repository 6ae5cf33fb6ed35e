//! Run reports and their CSV/JSON encodings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
    Skipped,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::ReportOnly => "report-only",
            Self::Skipped => "skipped",
        })
    }
}

/// How `value` is compared with `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `value ≤ target + tolerance`
    AtMost,
    /// `value ≥ target - tolerance`
    AtLeast,
    /// `|value - target| ≤ tolerance`
    Within,
    /// `value` is 1 (true) or 0 (false); passes on 1.
    Holds,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: &'static str,
    pub value: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub relation: Relation,
    pub status: Status,
}

impl Check {
    fn new(name: &str, anchor: &'static str, value: f64, target: Option<f64>, tolerance: Option<f64>, relation: Relation) -> Self {
        let (t, tol) = (target.unwrap_or(0.0), tolerance.unwrap_or(0.0));
        let ok = match relation {
            Relation::AtMost => value <= t + tol,
            Relation::AtLeast => value >= t - tol,
            Relation::Within => (value - t).abs() <= tol,
            Relation::Holds => value == 1.0,
            Relation::Report => true,
        };
        let status = match relation {
            Relation::Report => Status::ReportOnly,
            _ if ok => Status::Pass,
            _ => Status::Fail,
        };
        Self { name: name.to_string(), anchor, value, target, tolerance, relation, status }
    }

    pub fn at_most(name: &str, anchor: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, anchor, value, Some(target), Some(tol), Relation::AtMost)
    }

    pub fn at_least(name: &str, anchor: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, anchor, value, Some(target), Some(tol), Relation::AtLeast)
    }

    pub fn within(name: &str, anchor: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, anchor, value, Some(target), Some(tol), Relation::Within)
    }

    pub fn holds(name: &str, anchor: &'static str, ok: bool) -> Self {
        Self::new(name, anchor, if ok { 1.0 } else { 0.0 }, Some(1.0), None, Relation::Holds)
    }

    pub fn report(name: &str, anchor: &'static str, value: f64) -> Self {
        Self::new(name, anchor, value, None, None, Relation::Report)
    }

    pub fn skipped(name: &str, anchor: &'static str) -> Self {
        Self { status: Status::Skipped, ..Self::report(name, anchor, f64::NAN) }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

/// A CSV-shaped result table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Num(x as f64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub seed: u64,
    pub format: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: ConfigEcho,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, serde_json::Value>,
    /// Only with `--timing`, so that reports stay bit-identical otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

/// Plain notation in a readable range, scientific outside it.
fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Overall status: fail if any check fails, pass otherwise.
pub fn overall(checks: &[Check]) -> Status {
    if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    }
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// The result table if there is one, the checks otherwise.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(vec![]);
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(Cell::to_string))?;
                }
            }
            None => {
                w.write_record(["name", "anchor", "value", "target", "tolerance", "status"])?;
                for c in &self.checks {
                    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                    w.write_record([c.name.clone(), c.anchor.to_string(), c.value.to_string(), opt(c.target), opt(c.tolerance), c.status.to_string()])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }

    /// One line per check, for the terminal.
    pub fn summary(&self, mut out: impl Write) -> std::io::Result<()> {
        for c in &self.checks {
            let target = match (c.relation, c.target.map(num), c.tolerance.map(num)) {
                (Relation::AtMost, Some(t), Some(e)) => format!(" (<= {t} + {e})"),
                (Relation::AtLeast, Some(t), Some(e)) => format!(" (>= {t} - {e})"),
                (Relation::Within, Some(t), Some(e)) => format!(" (|x - {t}| <= {e})"),
                _ => String::new(),
            };
            writeln!(out, "{:<11} {} = {}{}", c.status.to_string().to_uppercase(), c.name, num(c.value), target)?;
        }
        writeln!(out, "{}: {}", self.config.command, self.status.to_string().to_uppercase())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert_eq!(Check::at_most("a", "x", 1.0, 1.0, 0.0).status, Status::Pass);
        assert_eq!(Check::at_most("a", "x", 1.1, 1.0, 0.05).status, Status::Fail);
        assert_eq!(Check::at_least("a", "x", 0.96, 1.0, 0.05).status, Status::Pass);
        assert_eq!(Check::within("a", "x", f64::NAN, 1.0, 1.0).status, Status::Fail);
        assert_eq!(Check::holds("a", "x", false).status, Status::Fail);
        assert_eq!(Check::report("a", "x", -1e300).status, Status::ReportOnly);
    }

    #[test]
    fn report_only_never_fails() {
        let checks = vec![Check::report("a", "x", f64::NAN), Check::holds("b", "x", true), Check::skipped("c", "x")];
        assert_eq!(overall(&checks), Status::Pass);
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(&["quantity", "params"]);
        t.push(vec!["a".into(), "twovalue:2,1".into()]);
        let r = RunReport {
            version: "0".into(),
            config: ConfigEcho { command: "x".into(), seed: 0, format: "csv".into(), params: BTreeMap::new() },
            status: Status::Pass,
            checks: vec![],
            table: Some(t),
            data: BTreeMap::new(),
            wall_seconds: None,
        };
        assert_eq!(r.to_csv().unwrap(), "quantity,params\na,\"twovalue:2,1\"\n");
    }
}
