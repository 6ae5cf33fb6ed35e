//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::commands::{self, Kind};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(CliError::schema("format", format!("expected csv or json, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Keys with a fixed meaning; everything else is a command parameter.
pub const RESERVED: &[&str] = &["command", "seed", "output", "format", "timing", "disable", "workers"];

/// What to run, with raw (unvalidated) parameter text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    /// `"module op"`, e.g. `"bellman tau"`, or `"suite fast"`.
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    /// Modules the suite skips.
    pub disable: Vec<String>,
    /// Suite worker count; `None` defers to the environment.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Parses file text. Lines are `key = value`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Syntax { line: n + 1, reason: format!("expected `key = value`, got `{line}`") });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(CliError::Syntax { line: n + 1, reason: format!("bad key `{k}`") });
            }
            if let Some(first) = seen.insert(k.to_string(), n + 1) {
                return Err(CliError::Syntax { line: n + 1, reason: format!("`{k}` already set on line {first}") });
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::schema("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key, interpreting reserved keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "command" => self.command = value.split_whitespace().collect::<Vec<_>>().join(" "),
            "seed" => self.seed = parse_count("seed", value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "timing" => {
                self.timing = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(CliError::schema("timing", format!("expected true or false, got `{value}`"))),
                }
            }
            "disable" => self.disable = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "workers" => {
                let w = parse_count("workers", value)?;
                if w == 0 {
                    return Err(CliError::schema("workers", "need at least one worker"));
                }
                self.workers = Some(w as usize);
            }
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Validates parameters against the command's schema and fills defaults.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let spec = commands::find(&self.command).ok_or_else(|| CliError::UnknownCommand(self.command.clone()))?;
        for k in self.params.keys() {
            if !spec.params.iter().any(|p| p.name == k) {
                let known: Vec<_> = spec.params.iter().map(|p| p.name).collect();
                return Err(CliError::schema(k, format!("not a parameter of `{}` (expected one of: {})", spec.name(), known.join(", "))));
            }
        }
        let mut values = BTreeMap::new();
        let mut echo = BTreeMap::new();
        for p in spec.params {
            let text = self.params.get(p.name).map(String::as_str).unwrap_or(p.default);
            values.insert(p.name, Value::parse(p.name, p.kind, text)?);
            echo.insert(p.name.to_string(), text.to_string());
        }
        Ok(Resolved { values, echo, seed: self.seed })
    }
}

/// Nonnegative integer; accepts `1e5`-style input when the value is integral.
pub fn parse_count(field: &str, s: &str) -> Result<u64, CliError> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| CliError::schema(field, format!("expected a nonnegative integer, got `{s}`")))?;
    if !(x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53)) {
        return Err(CliError::schema(field, format!("expected a nonnegative integer, got `{s}`")));
    }
    Ok(x as u64)
}

fn parse_real(field: &str, s: &str) -> Result<f64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::schema(field, format!("expected a finite real number, got `{s}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    Text(String),
    Reals(Vec<f64>),
}

impl Value {
    fn parse(field: &str, kind: Kind, s: &str) -> Result<Self, CliError> {
        Ok(match kind {
            Kind::Real => Value::Real(parse_real(field, s)?),
            Kind::Int => Value::Int(parse_count(field, s)?),
            Kind::Text => Value::Text(s.to_string()),
            // a blank value is the empty list
            Kind::Reals if s.trim().is_empty() => Value::Reals(vec![]),
            Kind::Reals => Value::Reals(s.split(',').map(|x| parse_real(field, x)).collect::<Result<Vec<_>, _>>()?),
        })
    }
}

/// Typed parameters of one run. Accessors panic on names or kinds the
/// command's schema does not declare.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    values: BTreeMap<&'static str, Value>,
    pub echo: BTreeMap<String, String>,
    pub seed: u64,
}

impl Resolved {
    fn get(&self, name: &str) -> &Value {
        self.values.get(name).unwrap_or_else(|| panic!("parameter `{name}` is not in the schema"))
    }

    pub fn real(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Real(x) => *x,
            v => panic!("`{name}` is {v:?}, not a real"),
        }
    }

    pub fn int(&self, name: &str) -> usize {
        match self.get(name) {
            Value::Int(x) => *x as usize,
            v => panic!("`{name}` is {v:?}, not an integer"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Text(x) => x,
            v => panic!("`{name}` is {v:?}, not text"),
        }
    }

    pub fn reals(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Value::Reals(x) => x,
            v => panic!("`{name}` is {v:?}, not a list"),
        }
    }
}
