use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_tracelab");

fn run(args: &[&str], config: &str, dir: &Path) -> (Output, PathBuf) {
    let cfg = dir.join("config-in.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let o = Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    (o, out)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

const BINOMIALS: &str = r#""capacities": {"mu": {"kind": "binomial", "p0": 0.25}, "nu": {"kind": "binomial", "p0": 0.3}}"#;

#[test]
fn tau_product_has_residual_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"capacities": {
        "mu": {"kind": "binomial", "p0": 0.25},
        "nu": {"kind": "binomial", "p0": 0.3},
        "xi": {"kind": "product", "left": {"kind": "ref", "name": "mu"}, "right": {"kind": "ref", "name": "nu"}}},
        "level": 8, "q_grid": [-3, 3, 0.5]}"#;
    let (o, out) = run(&["tau"], cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("tau_xi.csv"));
    assert_eq!(rows[0], ["q", "tau", "tau_prime", "tau_left", "tau_right", "residual"]);
    assert_eq!(rows.len(), 14);
    for row in &rows[1..] {
        assert!(row[5].parse::<f64>().unwrap().abs() < 1e-12);
    }
    assert_eq!(read_csv(&out.join("tau_mu.csv"))[0], ["q", "tau", "tau_prime"]);
}

#[test]
fn tau_lebesgue_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(&["tau"], r#"{"capacities": {"leb": {"kind": "lebesgue", "dim": 1}}, "level": 10}"#, dir.path());
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out.join("legendre_leb.csv"));
    assert_eq!(rows.len(), 2);
    let h: f64 = rows[1][0].parse().unwrap();
    let s: f64 = rows[1][1].parse().unwrap();
    assert!((h - 1.0).abs() < 1e-9 && (s - 1.0).abs() < 1e-9);
}

#[test]
fn malformed_weights_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run(&["tau"], r#"{"capacities": {"bad": {"kind": "cascade", "weights": [0.5, 0.6]}}}"#, dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum"));
    let (o, _) = run(&["tau"], r#"{"capacities": {}, "typo": 1}"#, dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn check_wavelet_db4_and_haar() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(&["check-wavelet"], r#"{"wavelet": "db4", "level": 14}"#, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let sched: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("schedule.json")).unwrap()).unwrap();
    assert!(sched["alpha"].as_f64().unwrap() > 0.0);

    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(&["check-wavelet"], r#"{"wavelet": "haar", "level": 12}"#, dir.path());
    assert_eq!(code(&o), 3);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["r1"], false);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn schedule_for_wrong_d_prime_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(&["check-wavelet"], r#"{"wavelet": "db4", "level": 12}"#, dir.path());
    assert_eq!(code(&o), 0);
    let sched = out.join("schedule.json");
    // ν on [0,1]² asks for d' = 2
    let cfg = format!(
        r#"{{"wavelet": "db4", "level": 12, "capacities": {{"nu": {{"kind": "lebesgue", "dim": 2}}}},
            "schedule": {{"file": {:?}}}}}"#,
        sched.to_str().unwrap()
    );
    let dir2 = tempfile::tempdir().unwrap();
    let (o, _) = run(&["check-wavelet"], &cfg, dir2.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn experiment_manifest_names_claim_and_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{"experiment": "additivity", {BINOMIALS}, "level": 8}}"#);
    let (o, out) = run(&["experiment"], &cfg, dir.path());
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["claim"], "prop-2.13");
    assert_eq!(m["status"], "pass");
    let files = m["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f["path"] == "tau.csv"));
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn failed_claim_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // zero tolerance: no estimate lands exactly on its target
    let cfg = format!(
        r#"{{"experiment": "saturating-shift", {BINOMIALS}, "max_level": 10, "samples": 2,
            "fit_window": [4, 9], "tolerances": {{"exponent": 0.0, "hit_fraction": 1.0}}}}"#
    );
    let (o, out) = run(&["experiment"], &cfg, dir.path());
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["claim"], "prop-5.5");
    assert_eq!(m["status"], "fail");
    assert!(out.join("exponents.csv").exists());
}

#[test]
fn same_seed_same_csv() {
    let cfg = format!(r#"{{"experiment": "upper-bound", {BINOMIALS}, "max_level": 10, "samples": 2, "fit_window": [4, 9]}}"#);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (oa, out_a) = run(&["experiment", "--seed", "7"], &cfg, a.path());
    let (ob, out_b) = run(&["experiment", "--seed", "7"], &cfg, b.path());
    assert_eq!(code(&oa), code(&ob));
    assert_eq!(fs::read(out_a.join("bounds.csv")).unwrap(), fs::read(out_b.join("bounds.csv")).unwrap());
    let c = tempfile::tempdir().unwrap();
    let (_, out_c) = run(&["experiment", "--seed", "8"], &cfg, c.path());
    assert_ne!(fs::read(out_a.join("bounds.csv")).unwrap(), fs::read(out_c.join("bounds.csv")).unwrap());
}

#[test]
fn lebesgue_shift_is_one_and_both_runs_emit_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"experiment": "prevalent-spectrum",
        "capacities": {"mu": {"kind": "binomial", "p0": 0.25}, "nu": {"kind": "lebesgue", "dim": 1}},
        "max_level": 10, "r_list": [0], "samples": 1, "fit_window": [4, 9], "field": {"kind": "perturbed"}}"#;
    let (o, out) = run(&["experiment"], cfg, dir.path());
    assert!(code(&o) == 0 || code(&o) == 1, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("summary.csv"));
    assert_eq!(rows[0][1], "predicted_shift");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0);
        assert!(!row[5].is_empty());
    }
    for kind in ["perturbed", "plain"] {
        let s = read_csv(&out.join(format!("spectrum_r0_rep0_{kind}.csv")));
        assert_eq!(s[0], ["h", "sigma", "predicted", "deviation"]);
        assert!(s.len() > 10);
    }
}

#[test]
fn dense_limit_points_to_implicit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{{BINOMIALS}, "max_level": 16, "field": {{"kind": "random"}}}}"#);
    let (o, _) = run(&["synthesize"], &cfg, dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--implicit"));
    let (o, out) = run(&["synthesize", "--implicit"], &cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("field.json").exists());
}

#[test]
fn trace_leaders_spectrum_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{{BINOMIALS}, "max_level": 10, "r_list": [0], "samples": 1, "fit_window": [4, 9]}}"#);
    let (o, closed) = run(&["trace", "--implicit"], &cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir2 = tempfile::tempdir().unwrap();
    let (o, tensor) = run(&["trace"], &cfg, dir2.path());
    assert_eq!(code(&o), 0);
    let idx = read_csv(&closed.join("traces.csv"));
    assert_eq!(idx[1][3], "closed-form");
    assert_eq!(read_csv(&tensor.join("traces.csv"))[1][3], "tensor");

    let inputs = [closed.join("trace_r0_0.bin"), tensor.join("trace_r0_0.bin")];
    let cfg = format!(
        r#"{{{BINOMIALS}, "max_level": 10, "r_list": [0], "fit_window": [4, 9], "points": [0.1, 0.3, 0.7],
            "inputs": [{:?}, {:?}]}}"#,
        inputs[0].to_str().unwrap(),
        inputs[1].to_str().unwrap()
    );
    let dir3 = tempfile::tempdir().unwrap();
    let (o, out) = run(&["leaders"], &cfg, dir3.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("exponents.csv"));
    assert_eq!(rows.len(), 7);
    // both routes give the same exponents
    for i in 1..=3 {
        let a: f64 = rows[i][4].parse().unwrap();
        let b: f64 = rows[i + 3][4].parse().unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }
    let dir4 = tempfile::tempdir().unwrap();
    let (o, out) = run(&["spectrum"], &cfg, dir4.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv(&out.join("spectrum_0.csv"))[0], ["h", "sigma", "predicted"]);
}

#[test]
fn missing_experiment_name_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run(&["experiment"], "{}", dir.path());
    assert_eq!(code(&o), 2);
}
