use std::path::Path;
use std::process::{Command, Output};

use pairanneal_cli::config::Scenario;

const SHORT: &str = r#"{
  "instance": {"h": [1.0, 0.25], "J": [[1, 2, 0.125]]},
  "driver": {"kind": "ancilla", "c": -0.5},
  "bath": {"gz": 0.1},
  "run": {"T": 20.0, "dt": 0.02, "snapshots": 11},
  "sweep": {
    "axis1": {"param": "c", "start": -1.0, "stop": -0.5, "points": 2},
    "axis2": {"param": "gz", "start": 0.0, "stop": 0.1, "points": 3}
  }
}"#;

fn pairanneal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairanneal")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn config_round_trips() {
    let s = Scenario::from_json(SHORT).unwrap();
    assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    let r = Scenario::reference();
    assert_eq!(Scenario::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHORT.replace("\"dt\"", "\"step\""));
    assert_eq!(pairanneal(&["--config", &cfg, "run"]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(pairanneal(&["--config", missing.to_str().unwrap(), "run"]).status.code(), Some(2));
}

#[test]
fn positive_c_fails_verification_and_is_refused_by_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHORT.replace("\"c\": -0.5", "\"c\": 0.5"));
    assert_eq!(pairanneal(&["--config", &cfg, "verify", "--quick"]).status.code(), Some(1));
    assert_eq!(pairanneal(&["--config", &cfg, "run"]).status.code(), Some(2));
}

#[test]
fn quick_verification_passes_on_the_reference_scenario() {
    let out = pairanneal(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn run_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let mut tables = vec![];
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = pairanneal(&["--config", &cfg, "--out", out.to_str().unwrap(), "run"]);
        assert_eq!(o.status.code(), Some(0));
        for file in ["run.csv", "run_series.csv", "run_series.svg"] {
            assert!(out.join(file).exists(), "{file}");
        }
        tables.push(std::fs::read(out.join("run_series.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let text = String::from_utf8(tables.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn spectrum_table_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let o = pairanneal(&["--config", &cfg, "spectrum", "--points", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn sweep_covers_the_grid_and_resumes_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let out = dir.path().join("sweep");
    let args = ["--config", &cfg, "--out", out.to_str().unwrap(), "--parallel", "2", "sweep"];
    let first = pairanneal(&args);
    assert_eq!(first.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut cells: Vec<(String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[1].to_owned())
        })
        .collect();
    assert_eq!(cells.len(), 6);
    cells.sort();
    cells.dedup();
    assert_eq!(cells.len(), 6);

    let second = pairanneal(&args);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_to_string(out.join("sweep.csv")).unwrap(), csv);
}
