use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sqg_cli::checkpoint::read_checkpoint;
use sqg_cli::report::SCHEMA_V1;

fn sqg(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sqg"));
    c.args(args).env_remove("SQG_OUTPUT_DIR");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn assert_schema_valid(report: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA_V1).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.json");
    let text = format!(
        r#"{{
            "version": 1,
            "grid": {{"n": 32, "alpha": 0.75}},
            "dt": 0.01, "t_end": 0.2, "seed": 11,
            "snapshot_every": 5,
            "initial": {{"kind": "random_hk", "k_min": 1, "k_max": 5, "amplitude": 0.5}},
            "diagnostics": {{"levels": [0, 0.25, 0.5]}},
            "output": {{"dir": "{}", "prefix": "t"}}{extra}
        }}"#,
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn constants_json_reports_r0() {
    let out = sqg(&["constants", "--alpha", "0.75", "--c0", "0.6", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"r0\": 0.00234375"), "{text}");
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_schema_valid(&report);
    assert_eq!(report["results"]["chain"]["all_hold"], Value::Bool(true));
}

#[test]
fn constants_sweep_validates_against_schema() {
    let out = sqg(&["constants", "--sweep", "0.55:0.95:0.05", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema_valid(&report);
    assert_eq!(report["results"].as_array().unwrap().len(), 9);
}

#[test]
fn missing_config_is_a_schema_error() {
    let out = sqg(&["simulate", "--config", "missing.json", "--json"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    assert!(err["message"].as_str().unwrap().contains("config schema"));
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#", "viscosity": 1"#);
    let out = sqg(&["simulate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let read = |name: &str| std::fs::read(dir.path().join("out").join(name)).unwrap();
    let out = sqg(&["simulate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (csv1, rep1, chk1) = (read("t_norms.csv"), read("t_report.json"), read("t_final.sqgf"));
    let out = sqg(&["simulate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv1, read("t_norms.csv"));
    assert_eq!(rep1, read("t_report.json"));
    assert_eq!(chk1, read("t_final.sqgf"));

    let csv = String::from_utf8(csv1).unwrap();
    assert!(csv.starts_with("t,l2,sup,h_alpha_half\n"));
    assert_eq!(csv.lines().count(), 22);
    let report: Value = serde_json::from_slice(&rep1).unwrap();
    assert_schema_valid(&report);
    assert_eq!(report["results"]["level_sets"].as_array().unwrap().len(), 3);
    let chk = read_checkpoint(&dir.path().join("out/t_final.sqgf")).unwrap();
    assert_eq!(chk.sizes, vec![32, 32]);
    assert_eq!(chk.t, 0.2);
}

#[test]
fn output_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let other = dir.path().join("elsewhere");
    let out = sqg(&["simulate", "--config", cfg.to_str().unwrap()], &[("SQG_OUTPUT_DIR", &other)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(other.join("t_norms.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn extend_reads_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    assert_eq!(sqg(&["simulate", "--config", cfg.to_str().unwrap()], &[]).status.code(), Some(0));
    let chk = dir.path().join("out/t_final.sqgf");
    let out = sqg(&["extend", "--checkpoint", chk.to_str().unwrap(), "--json"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema_valid(&report);
    assert!(report["results"]["trace_ratio_spread"].as_f64().unwrap() < 1e-3);
}

#[test]
fn blow_up_exits_two_and_keeps_last_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("\"amplitude\": 0.5", "\"amplitude\": 1e6");
    std::fs::write(&cfg, text).unwrap();
    let out = sqg(&["simulate", "--config", cfg.to_str().unwrap(), "--json"], &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "numerical");
    assert!(dir.path().join("out/t_last_valid.sqgf").exists());
}

#[test]
fn recursion_closed_form_threshold() {
    let out = sqg(&["diagnose", "recursion", "--c", "1", "--beta", "2", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema_valid(&report);
    assert_eq!(report["results"]["threshold"].as_f64(), Some(1.0));
}

#[test]
fn verify_neumann_report() {
    let out = sqg(&["verify", "neumann", "--alpha", "0.8", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema_valid(&report);
    assert_eq!(report["results"][0]["passed"], Value::Bool(true));
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema: Value = serde_json::from_str(SCHEMA_V1).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let bad = serde_json::json!({"schema": "sqg-report", "schema_version": 2, "kind": "constants", "parameters": {}, "results": {}});
    assert!(!v.is_valid(&bad));
    let bad = serde_json::json!({"schema": "sqg-report", "schema_version": 1, "kind": "constants", "parameters": {}, "results": {"alpha": 0.5}});
    assert!(!v.is_valid(&bad));
}
