// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use roa_core::report::Table;

fn roa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roa")).args(args).output().expect("spawn roa")
}

fn table(p: &Path) -> Table {
    Table::read(fs::File::open(p).unwrap()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn preset_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("a.json");
    let out = roa(&["preset", "bath-A", "--method", "lorentzian-high", "--output", path_str(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("\"lorentzian-high\""));
    let out = roa(&["validate", "--config", path_str(&cfg)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 sites"));
}

#[test]
fn run_writes_csv_manifest_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let out = roa(&["run", "--preset", "bath-C", "--t-max", "1", "--output", path_str(&csv), "--gnuplot"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = table(&csv);
    assert_eq!(table.columns[0], "t");
    assert_eq!(table.rows.len(), 51);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "completed");
    assert_eq!(manifest["method"], "lorentzian-low");
    assert_eq!(manifest["samples"], 51);
    assert!(dir.path().join("c.gp").exists());
}

#[test]
fn divergence_exits_three_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = roa(&["run", "--preset", "bath-B", "--method", "lorentzian-high", "--output", path_str(&csv)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "diverged");
    let t = manifest["time"].as_f64().unwrap();
    assert!(t > 5.0 && t < 30.0, "{t}");
    assert!(table(&csv).rows.len() > 100);
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"n_sites": 2, "couplings": [[[0,0],[1,0]],[[2,0],[0,0]]], "baths": [[],[]], "initial_state": [[1,0],[0,0]], "method": "lorentzian-low"}"#).unwrap();
    let out = roa(&["validate", "--config", path_str(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("couplings"));
    assert_eq!(code(&roa(&["run", "--preset", "ring-15"])), 2);
    assert_eq!(code(&roa(&["run", "--preset", "bath-Q"])), 2);
    assert_eq!(code(&roa(&["run"])), 2);
}

#[test]
fn ring_runs_with_supplied_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let peaks = r#"[{"gamma": 0.2, "Gamma": 0.5, "omega0": 1.0}]"#;
    let out = roa(&["run", "--preset", "ring-15", "--peaks", peaks, "--t-max", "0.1", "--output", path_str(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = table(&csv);
    let p = table.series("rho_8_8_re").unwrap();
    assert_eq!(p[0], (0.0, 1.0));
    assert!(p[5].1 < 1.0);
}

#[test]
fn compare_self_is_zero_and_detects_differences() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&roa(&["run", "--preset", "bath-A", "--t-max", "2", "--output", path_str(&a)])), 0);
    assert_eq!(code(&roa(&["run", "--preset", "bath-A", "--method", "lorentzian-high", "--t-max", "2", "--output", path_str(&b)])), 0);
    let out = roa(&["compare", path_str(&a), path_str(&a), "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rms"].as_f64().unwrap(), 0.0);
    let out = roa(&["compare", path_str(&a), path_str(&b), "--metric", "max-abs", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_abs"].as_f64().unwrap() > 1e-4);
    assert_eq!(code(&roa(&["compare", path_str(&a), path_str(&b), "--column", "nope"])), 1);
}

#[test]
fn uncoupled_scenario_matches_rabi_oscillation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dimer.json");
    fs::write(
        &cfg,
        r#"{"n_sites": 2, "couplings": [[[0,0],[-1,0]],[[-1,0],[0,0]]],
            "baths": [[{"gamma": 0.1, "Gamma": 0.0, "omega0": 1.0}], []],
            "initial_state": [[1,0],[0,0]], "method": "lorentzian-high",
            "integrator": {"dt": 0.001, "t_max": 3.0, "sample_stride": 100}}"#,
    )
    .unwrap();
    let csv = dir.path().join("dimer.csv");
    assert_eq!(code(&roa(&["run", "--config", path_str(&cfg), "--output", path_str(&csv)])), 0);
    let table = table(&csv);
    let series = table.series("rho_1_1_re").unwrap();
    assert_eq!(series.len(), 31);
    for (t, p) in series {
        assert!((p - t.cos().powi(2)).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = roa(&["run", "--preset", "bath-A", "--method", "pm-reference", "--t-max", "0.2", "--deterministic", "--no-pm-check", "--output", path_str(p)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_writes_one_file_per_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut configs = Vec::new();
    for name in ["bath-A", "bath-C"] {
        let p = dir.path().join(format!("{name}.json"));
        assert_eq!(code(&roa(&["preset", name, "--output", path_str(&p)])), 0);
        configs.push(p);
    }
    let out_dir = dir.path().join("out");
    let mut args = vec!["sweep", "--t-max", "0.5", "--output-dir", path_str(&out_dir)];
    args.extend(configs.iter().map(|p| path_str(p)));
    let out = roa(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("bath-A.csv").exists());
    assert!(out_dir.join("bath-C.manifest.json").exists());
}
