//! End-to-end tests of the `dwpf` binary: exit-code contract, deterministic
//! JSON reports, and the documented example values.

use std::io::Write;
use std::process::{Command, Output};

fn dwpf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwpf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn compute_l1_izergin_is_sin_gamma() {
    // Z1 = [1] = sin(1) independently of x and y
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        cfg,
        r#"{{"schema":1,"mode":"trig","gamma":[1.0,0.0],"l":1,"x":[[0.3,0.0]],"y":[[0.1,0.0]],"formulas":["izergin"]}}"#
    )
    .unwrap();
    let out = dwpf(&["compute", "--config", cfg.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let val = &v["results"][0]["value"];
    assert!((val[0].as_f64().unwrap() - 0.8414709848078965).abs() < 1e-12);
    assert!(val[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn compute_determinant_vs_sum_match() {
    let out = dwpf(&[
        "compute",
        "-L",
        "2",
        "--formula",
        "izergin",
        "--formula",
        "symmetrized_sum",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let a = &v["results"][0]["value"];
    let b = &v["results"][1]["value"];
    let d = ((a[0].as_f64().unwrap() - b[0].as_f64().unwrap()).powi(2)
        + (a[1].as_f64().unwrap() - b[1].as_f64().unwrap()).powi(2))
    .sqrt();
    assert!(d < 1e-10, "determinant and sum differ by {d}");
}

#[test]
fn malformed_config_exits_2() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(cfg, "this is not json").unwrap();
    let out = dwpf(&["compute", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_without_seed_exits_2() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(cfg, r#"{{"schema":1,"l":2,"x":"random","y":"random"}}"#).unwrap();
    let out = dwpf(&["compute", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn guard_violation_exits_3_and_names_the_guard() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        cfg,
        r#"{{"schema":1,"l":2,"x":[[0.3,0.0],[0.3,0.0]],"y":[[1.0,0.1],[-0.4,0.0]]}}"#
    )
    .unwrap();
    let out = dwpf(&["compute", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("x_i-x_j"), "guard not named: {err}");
}

#[test]
fn validate_passes_and_is_deterministic() {
    let a = dwpf(&["validate", "--seed", "42", "--threads", "3"]);
    assert_eq!(a.status.code(), Some(0));
    let b = dwpf(&["validate", "--seed", "42", "--threads", "3"]);
    assert_eq!(
        stdout(&a),
        stdout(&b),
        "same seed + threads must be byte-identical"
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["summary"]["failed"].as_u64(), Some(0));
    assert!(v["summary"]["total"].as_u64().unwrap() >= 60);
}

#[test]
fn validate_check_ids_are_unique() {
    let out = dwpf(&["validate", "--seed", "13"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ids: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    let mut dedup = ids.clone();
    dedup.sort();
    dedup.dedup();
    assert_eq!(dedup.len(), ids.len(), "duplicate check ids");
}

#[test]
fn validate_perturb_controls_detect_and_exit_0() {
    let out = dwpf(&["validate", "--perturb", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for check in v["checks"].as_array().unwrap() {
        assert_eq!(check["expected"].as_str(), Some("large"));
        assert_eq!(check["pass"].as_bool(), Some(true));
    }
}

#[test]
fn validate_overtight_tolerance_fails_with_exit_1() {
    let out = dwpf(&["validate", "--seed", "42", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn bench_reports_term_counts() {
    let out = dwpf(&["bench", "--lmin", "3", "--lmax", "4", "--seed", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let sym4 = rows
        .iter()
        .find(|r| r["method"] == "symmetrized_sum" && r["l"] == 4)
        .unwrap();
    assert_eq!(sym4["terms"].as_u64(), Some(24));
    let enum4 = rows
        .iter()
        .find(|r| r["method"] == "enumerate" && r["l"] == 4)
        .unwrap();
    assert_eq!(enum4["terms"].as_u64(), Some(42));
}

#[test]
fn env_var_thread_fallback() {
    let out = Command::new(env!("CARGO_BIN_EXE_dwpf"))
        .args(["validate", "--seed", "11", "--perturb"])
        .env("DWPF_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["threads"].as_u64(), Some(2));
}
