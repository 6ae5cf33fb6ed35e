//! Argument parsing. The clap tree is generated from the command registry.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::commands::{self, Kind};
use crate::config::ExperimentConfig;
use crate::error::CliError;

const GLOBALS: &[(&str, &str)] = &[
    ("seed", "master seed (default 0)"),
    ("format", "json or csv"),
    ("output", "write the report here instead of stdout"),
    ("disable", "comma-separated modules or entries the suite skips"),
    ("workers", "suite worker threads (default: $BELLMAN_LAB_WORKERS or all cores)"),
];

fn kind_hint(k: Kind) -> &'static str {
    match k {
        Kind::Real => "REAL",
        Kind::Int => "INT",
        Kind::Text => "TEXT",
        Kind::Reals => "LIST",
    }
}

fn module_about(m: &str) -> &'static str {
    match m {
        "dyadic" => "Haar analysis, weights and Carleson sequences on [0,1]",
        "bellman" => "explicit Bellman candidates and the constants built on them",
        "planar" => "FFT multipliers, heat extensions and planar weights",
        "laminate" => "line-plus-atom measures and the p-1 ratio",
        "stoch" => "Brownian paths, Ito sums and heat martingales",
        "qc" => "radial quasiconformal model maps",
        _ => "",
    }
}

pub fn command() -> Command {
    let mut root = Command::new("bellman-lab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Numerical experiments for Bellman functions, Riesz transforms and laminates")
        .arg(Arg::new("config").long("config").value_name("FILE").global(true).help("key = value file; flags override it"))
        .arg(Arg::new("timing").long("timing").action(ArgAction::SetTrue).global(true).help("record wall time in the report"));
    for (name, help) in GLOBALS {
        root = root.arg(Arg::new(*name).long(*name).global(true).help(*help));
    }
    let mut modules: Vec<&str> = commands::all().map(|c| c.module).collect();
    modules.dedup();
    for m in modules {
        let mut sub = Command::new(m).about(module_about(m)).subcommand_required(true);
        for c in commands::all().filter(|c| c.module == m) {
            let mut op = Command::new(c.op).about(c.about);
            for p in c.params {
                let help = if p.default.is_empty() { p.help.to_string() } else { format!("{} [default: {}]", p.help, p.default) };
                op = op.arg(Arg::new(p.name).long(p.name).value_name(kind_hint(p.kind)).allow_negative_numbers(true).help(help));
            }
            sub = sub.subcommand(op);
        }
        root = root.subcommand(sub);
    }
    root.subcommand(
        Command::new("suite")
            .about("curated acceptance battery")
            .subcommand_required(true)
            .subcommand(Command::new("fast").about("reduced-scale battery"))
            .subcommand(Command::new("full").about("full-scale battery")),
    )
}

/// Config file first, then the subcommand and every flag given.
pub fn config_from(m: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match m.get_one::<String>("config") {
        Some(path) => ExperimentConfig::load(&PathBuf::from(path))?,
        None => ExperimentConfig::default(),
    };
    if let Some((module, sub)) = m.subcommand() {
        let Some((op, leaf)) = sub.subcommand() else {
            return Err(CliError::UnknownCommand(module.to_string()));
        };
        cfg.command = format!("{module} {op}");
        for id in leaf.ids() {
            let id = id.as_str();
            if GLOBALS.iter().any(|(g, _)| *g == id) || matches!(id, "config" | "timing") {
                continue;
            }
            if let Some(v) = leaf.get_one::<String>(id) {
                cfg.set(id, v)?;
            }
        }
    }
    for (g, _) in GLOBALS {
        if let Some(v) = m.get_one::<String>(g) {
            cfg.set(g, v)?;
        }
    }
    if m.get_flag("timing") {
        cfg.timing = true;
    }
    if cfg.command.is_empty() {
        return Err(CliError::UnknownCommand(String::new()));
    }
    Ok(cfg)
}

/// Parses, runs and prints; returns the process exit status.
pub fn main(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = config_from(&matches).and_then(|cfg| {
        let report = crate::run(&cfg)?;
        if cfg.output.is_none() {
            std::io::stdout().write_all(report.render(cfg.format)?.as_bytes())?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            let _ = report.summary(std::io::stderr());
            crate::exit_status(&report)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
