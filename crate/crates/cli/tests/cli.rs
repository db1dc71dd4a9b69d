//! End-to-end runs of the `lrinv` binary.

use std::process::{Command, Output};

fn lrinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrinv"))
        .args(args)
        .output()
        .expect("failed to launch lrinv")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "lrinv failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn eigen_table_has_one_column_per_method() {
    let text = stdout(&lrinv(&["eigen", "--n", "0..3", "--method", "exact,perturbative,wkb"]));
    assert!(text.starts_with("n,lambda_exact,lambda_pert,lambda_wkb\n"));
    assert_eq!(text.lines().count(), 5);
    let exact = column(&text, "lambda_exact");
    let wkb = column(&text, "lambda_wkb");
    for (a, b) in exact.iter().zip(&wkb) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn unsupported_methods_leave_empty_fields() {
    let text = stdout(&lrinv(&["eigen", "--model", "B", "--ell", "2", "--method", "exact,wkb"]));
    assert!(column(&text, "lambda_wkb").iter().all(String::is_empty));
    assert!(!column(&text, "lambda_exact")[0].is_empty());
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_lrinv"))
            .args(["autocorr", "--n", "0..2", "--steps", "40"])
            .env("LR_NUM_THREADS", threads)
            .output()
            .unwrap();
        stdout(&out)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("4"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    std::fs::write(&cfg, r#"{"model": "A", "m": 3, "omega": 0.5, "E0": 2, "c_kappa": 0.1, "n": 1, "time": {"steps": 0}}"#)
        .unwrap();
    let cfg = cfg.to_str().unwrap();
    let text = stdout(&lrinv(&["--config", cfg, "observables", "--method", "exact"]));
    let x: f64 = column(&text, "mean_x")[0].parse().unwrap();
    assert!((x + 0.625).abs() < 1e-14, "{x}");
    let text = stdout(&lrinv(&["--config", cfg, "observables", "--method", "exact", "--E0", "0"]));
    let x: f64 = column(&text, "mean_x")[0].parse().unwrap();
    assert_eq!(x, 0.0);
}

#[test]
fn out_directory_receives_named_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lrinv(&["--out", d, "ep", "--steps", "4"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("ep.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(!text.contains('\r'));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["eigen", "--model", "C"],
        vec!["eigen", "--n", "3..1"],
        vec!["observables", "--model", "B", "--Omega", "0.3"],
        vec!["ep", "--m", "-1"],
        vec!["observables", "--method", "wkb"],
        vec!["figures", "--id", "7"],
        vec!["frobnicate"],
        vec!["--config", "/nonexistent/scenario.json", "ep"],
    ] {
        let out = lrinv(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"mass": 1}"#).unwrap();
    let out = lrinv(&["--config", cfg.to_str().unwrap(), "ep"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_json_and_passes() {
    let out = lrinv(&["verify"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = report.as_array().unwrap();
    assert!(checks.len() >= 6);
    for c in checks {
        assert_eq!(c["status"], "pass", "{c}");
        assert!(c["value"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn figure_two_starts_at_full_overlap() {
    let text = stdout(&lrinv(&["figures", "--id", "2"]));
    assert!(text.starts_with("t,c_kappa,A_exact_0,A_pert_0,"));
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    for v in &first[2..] {
        assert_eq!(v.parse::<f64>().unwrap(), 1.0);
    }
}
