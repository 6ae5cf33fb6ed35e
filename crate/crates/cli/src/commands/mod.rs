//! Subcommand registry: one schema and one runner per `module op`.

use std::collections::BTreeMap;

use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

mod bellman;
mod dyadic;
mod laminate;
mod planar;
mod qc;
mod stoch;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Int,
    Text,
    /// Comma-separated reals.
    Reals,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn real(name: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { name, kind: Kind::Real, default, help }
}

pub const fn int(name: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { name, kind: Kind::Int, default, help }
}

pub const fn text(name: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { name, kind: Kind::Text, default, help }
}

pub const fn reals(name: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { name, kind: Kind::Reals, default, help }
}

/// What a runner hands back; the caller adds the config echo and status.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub table: Option<Table>,
    pub data: BTreeMap<String, serde_json::Value>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn data(&mut self, key: &str, v: impl Into<serde_json::Value>) -> &mut Self {
        self.data.insert(key.to_string(), v.into());
        self
    }
}

pub type Runner = fn(&Resolved) -> Result<Outcome, CliError>;

pub struct CommandSpec {
    pub module: &'static str,
    pub op: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
    pub run: Runner,
}

impl CommandSpec {
    pub fn name(&self) -> String {
        format!("{} {}", self.module, self.op)
    }
}

pub const MODULES: &[&[CommandSpec]] = &[dyadic::SPECS, bellman::SPECS, planar::SPECS, laminate::SPECS, stoch::SPECS, qc::SPECS];

pub fn all() -> impl Iterator<Item = &'static CommandSpec> {
    MODULES.iter().flat_map(|m| m.iter())
}

pub fn find(command: &str) -> Option<&'static CommandSpec> {
    let mut it = command.split_whitespace();
    let (m, o) = (it.next()?, it.next()?);
    if it.next().is_some() {
        return None;
    }
    all().find(|c| c.module == m && c.op == o)
}

/// `[x, y]` from a two-element list parameter.
pub(crate) fn pair(r: &Resolved, name: &str) -> Result<[f64; 2], CliError> {
    match r.reals(name) {
        [x, y] => Ok([*x, *y]),
        v => Err(CliError::schema(name, format!("expected two numbers, got {}", v.len()))),
    }
}

pub(crate) fn json_f64s(v: &[f64]) -> serde_json::Value {
    v.iter().copied().map(serde_json::Value::from).collect::<Vec<_>>().into()
}
