use std::path::Path;
use std::process::{Command, Output};

use ies_core::cli::Report;
use serde_json::Value;
use tempfile::TempDir;

const SPEC: &str = r#"{
  "dims": 4,
  "seed": 11,
  "groups": [
    {"center": [0, 0, 0, 0], "spread": 0.2, "count": 25},
    {"center": [40, 0, 0, 0], "spread": 0.2, "count": 25},
    {"center": [40, 4, 0, 0], "spread": 0.2, "count": 25}
  ]
}"#;

fn cluster(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &TempDir) -> std::path::PathBuf {
    let spec = dir.path().join("spec.json");
    let csv = dir.path().join("data.csv");
    std::fs::write(&spec, SPEC).unwrap();
    let out = cluster(&["synth", "--spec", path(&spec), "--output", path(&csv)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    csv
}

fn error_code(out: &Output) -> String {
    let body: Value = serde_json::from_slice(&out.stderr).expect("JSON error on stderr");
    body["error"].as_str().unwrap().to_string()
}

#[test]
fn run_writes_full_report() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir);
    let json = dir.path().join("report.json");
    let out = cluster(&[
        "run",
        "--mode",
        "ies-global",
        "--input",
        path(&csv),
        "--label-col",
        "label",
        "--output",
        path(&json),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = std::fs::read_to_string(&json).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    for key in [
        "schema_version",
        "mode",
        "params",
        "sigma_trace",
        "tree",
        "assignments",
        "metrics",
        "runtime_ms",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["mode"], "ies-global");
    assert_eq!(v["assignments"].as_array().unwrap().len(), 75);

    let report = Report::from_json(&text).unwrap();
    assert_eq!(
        Report::from_json(&report.to_json().unwrap()).unwrap(),
        report
    );
    assert!(report.runtime_ms > 0.0);
    let metrics = report.metrics.as_ref().unwrap();
    assert_eq!(metrics.n_clusters, report.cluster_count());
    assert!(metrics.f_measure > 0.95, "F = {}", metrics.f_measure);
}

#[test]
fn repeated_runs_match_except_runtime() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir);
    let mut reports = Vec::new();
    for i in 0..2 {
        let json = dir.path().join(format!("r{i}.json"));
        let out = cluster(&[
            "run",
            "--mode",
            "ies-local",
            "--input",
            path(&csv),
            "--label-col",
            "label",
            "--seed",
            "9",
            "--output",
            path(&json),
        ]);
        assert!(out.status.success());
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        reports.push(v);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn njw_without_k_is_config_error() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir);
    let json = dir.path().join("r.json");
    let out = cluster(&[
        "run",
        "--mode",
        "njw",
        "--input",
        path(&csv),
        "--output",
        path(&json),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "config");
    assert!(!json.exists());

    let out = cluster(&[
        "run",
        "--mode",
        "njw",
        "--k",
        "3",
        "--input",
        path(&csv),
        "--label-col",
        "label",
        "--output",
        path(&json),
    ]);
    assert!(out.status.success());
    let report = Report::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.cluster_count(), 3);
}

#[test]
fn malformed_input_is_data_error() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "a,b\n1,2\n3\n").unwrap();
    let out = cluster(&[
        "run",
        "--mode",
        "ies-global",
        "--input",
        path(&csv),
        "--output",
        path(&dir.path().join("r.json")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_code(&out), "parse");
}

#[test]
fn elbow_emits_curve() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir);
    let out_csv = dir.path().join("elbow.csv");
    let out = cluster(&[
        "elbow",
        "--input",
        path(&csv),
        "--label-col",
        "label",
        "--k-min",
        "1",
        "--k-max",
        "6",
        "--seed",
        "3",
        "--output",
        path(&out_csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,sse"));
    let ks: Vec<usize> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ks, vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn sigma_in_local_mode_is_rejected() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir);
    let out = cluster(&[
        "run",
        "--mode",
        "els",
        "--sigma",
        "2",
        "--input",
        path(&csv),
        "--output",
        path(&dir.path().join("r.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
