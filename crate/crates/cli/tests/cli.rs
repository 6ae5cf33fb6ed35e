use std::process::{Command, Output};

use bellman_lab::planar::{read_field, write_field, GridField};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellman-lab")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn tau_at_two() {
    let o = run(&["bellman", "tau", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let c = check(&r, "tau");
    assert!((c["value"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    assert_eq!(c["status"], "pass");
    assert_eq!(r["config"]["params"]["p"], "2");
    assert!(r["version"].as_str().unwrap().starts_with("bellman-lab "));
    assert!(c["anchor"].as_str().is_some_and(|a| !a.is_empty()));
    assert!(r.get("wall_seconds").is_none());
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "command = bellman tau\np = four\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`p`"), "{}", stderr(&o));

    std::fs::write(&path, "command = bellman tau\nq = 3\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`q`"), "{}", stderr(&o));

    std::fs::write(&path, "command = bellman tau\np 3\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# tau at three\ncommand = bellman tau\np = 3\nseed = 4\n").unwrap();
    let r = json(&run(&["--config", path.to_str().unwrap()]));
    assert_eq!((r["config"]["params"]["p"].as_str(), r["config"]["seed"].as_u64()), (Some("3"), Some(4)));
    let r = json(&run(&["--config", path.to_str().unwrap(), "bellman", "tau", "--p", "2"]));
    assert_eq!(r["config"]["params"]["p"], "2");
}

#[test]
fn usage_and_module_errors_have_distinct_statuses() {
    assert_eq!(run(&["bellman", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    // the library rejects a negative regularization by name
    let o = run(&["laminate", "ratio", "--eta", "-1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.field");
    std::fs::write(&bad, b"not a field").unwrap();
    let out = dir.path().join("out.field");
    let o = run(&["planar", "transform", "--input", bad.to_str().unwrap(), "--result", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn red_checks_exit_one() {
    let o = run(&["bellman", "interp-sweep", "--points", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["status"], "fail");
}

#[test]
fn laminate_sweep_csv() {
    let o = run(&["laminate", "sweep", "--p", "3", "--etas", "1e-1,1e-2,1e-3,1e-4", "--format", "csv"]);
    let err = stderr(&o);
    assert_eq!(o.status.code(), Some(0), "{err}");
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["eta", "ratio", "ratio_root", "target", "K", "printed_ratio"]);
    let rows: Vec<Vec<f64>> = rdr.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!((rows[3][2] - 2.0).abs() <= 5e-3);
    assert!(err.contains("PASS        limit"), "{err}");
}

#[test]
fn output_file_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["qc", "distortion", "--K", "3", "--timing", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert!((check(&r, "slope")["value"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-10);
}

#[test]
fn field_files_round_trip_through_transform() {
    let dir = tempfile::tempdir().unwrap();
    let (input, result) = (dir.path().join("f.field"), dir.path().join("g.field"));
    let f = GridField::from_real_fn(32, 6.0, |x, y| (-(x * x + 2.0 * y * y)).exp()).unwrap();
    write_field(&input, &f).unwrap();
    let o = run(&["planar", "transform", "--op", "heat:0", "--input", input.to_str().unwrap(), "--result", result.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = read_field(&result).unwrap();
    let err = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-14, "{err}");
}

#[test]
fn disabled_modules_are_skipped() {
    let o = run(&["suite", "fast", "--disable", "dyadic,bellman,planar,laminate,stoch"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "02-tau-scan/*" && c["status"] == "skipped"));
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().starts_with("10-threshold-K2/") && c["status"] == "pass"));
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    assert_eq!(run(&["suite", "fast", "--disable", "astrology"]).status.code(), Some(2));
}

#[test]
fn reports_are_bit_identical_per_seed() {
    let args = |s: &'static str| ["stoch", "riemann-gap", "--paths", "2e4", "--steps", "100", "--seed", s];
    let (a, b, c) = (run(&args("5")), run(&args("5")), run(&args("6")));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn suite_is_independent_of_worker_count() {
    let args = |w: &'static str| ["suite", "fast", "--disable", "planar,stoch,laminate,bellman", "--workers", w];
    let (a, b) = (run(&args("1")), run(&args("3")));
    assert_eq!(a.stdout, b.stdout);
}
