use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn symbreak(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbreak"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("SYMBREAK_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) {
    let out = symbreak(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// Data rows of a CSV file, skipping `#` lines and the header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    lines.next().expect("header row");
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn column(path: &Path, i: usize) -> Vec<f64> {
    rows(path).iter().map(|r| r[i].parse().unwrap()).collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn ring_fringe_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    ok(&["fringe", "--n", "100", "--thetas", "0"], tmp.path());
    let f = tmp.path().join("fringe_00.csv");
    let (r, v) = (column(&f, 0), column(&f, 1));
    // default ring: 3 windings on L = 10
    let k = 2.0 * PI * 3.0 / 10.0;
    let max = v.iter().cloned().fold(0.0, f64::max);
    for (x, y) in r.iter().zip(&v) {
        let want = 2.0 * 100.0 / 10.0 * (1.0 + (2.0 * k * x).cos());
        assert!((y - want).abs() <= 1e-9 * max, "r = {x}: {y} vs {want}");
    }
    assert!((max / (2.0 * 2.0 * 100.0 / 10.0) - 1.0).abs() < 1e-9);
    let flat = column(&tmp.path().join("no_fringe.csv"), 1);
    assert!(flat.iter().all(|y| (y - 20.0).abs() < 1e-9));
}

#[test]
fn theta_sweep_writes_one_file_per_angle() {
    let tmp = TempDir::new().unwrap();
    ok(&["fringe", "--thetas", "0,0.5,1,1.5,2,2.5,3,-0.5"], tmp.path());
    let count = std::fs::read_dir(tmp.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("fringe_"))
        .count();
    assert_eq!(count, 8);
}

#[test]
fn released_gaussians_have_no_fringes_at_release() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"fringe": {"model": {"kind": "gaussian", "trap_frequency": 1.0, "separation": 12.0},
            "n": 50, "t": 0.0, "thetas": [0.0, 1.7], "points": 2001}}"#,
    );
    ok(&["--config", &cfg, "fringe"], tmp.path());
    let base = column(&tmp.path().join("no_fringe.csv"), 1);
    let x = column(&tmp.path().join("no_fringe.csv"), 0);
    let max = base.iter().cloned().fold(0.0, f64::max);
    for name in ["fringe_00.csv", "fringe_01.csv"] {
        let v = column(&tmp.path().join(name), 1);
        assert!(v.iter().zip(&base).all(|(a, b)| (a - b).abs() < 1e-6 * max));
    }
    // two bumps centred at ∓d/2
    let peaks: Vec<f64> =
        (1..base.len() - 1).filter(|&i| base[i] > base[i - 1] && base[i] >= base[i + 1]).map(|i| x[i]).collect();
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!((peaks[0] + 6.0).abs() < 0.05 && (peaks[1] - 6.0).abs() < 0.05);
}

#[test]
fn detect_is_reproducible_and_well_formed() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["--seed", "11", "detect", "--n", "40", "--detections", "80", "--runs", "24"];
    ok(&args, a.path());
    let out = Command::new(env!("CARGO_BIN_EXE_symbreak"))
        .args(args)
        .arg("--out-dir")
        .arg(b.path())
        .env("SYMBREAK_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["run.json", "ensemble.json", "phase_histogram.csv", "density.csv", "runs.csv", "run_positions.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let hist = rows(&a.path().join("phase_histogram.csv"));
    assert_eq!(hist.len(), 36);
    assert_eq!(hist.iter().map(|r| r[1].parse::<u64>().unwrap()).sum::<u64>(), 24);
    let vis = column(&a.path().join("runs.csv"), 3);
    assert_eq!(vis.len(), 24);
    assert!(vis.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));

    let head = std::fs::read_to_string(a.path().join("runs.csv")).unwrap();
    assert!(head.starts_with("# symbreak detect\n# seed: 11\n# config: {"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("ensemble.json")).unwrap()).unwrap();
    assert_eq!(json["meta"]["seed"], 11);
    assert_eq!(json["result"]["run_count"], 24);
}

#[test]
fn scaling_exponents() {
    let tmp = TempDir::new().unwrap();
    ok(&["scaling", "--theorem-n-values", "10,100,1000"], tmp.path());
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("exponents.json")).unwrap()).unwrap();
    let slope = |family: &str| {
        json["result"].as_array().unwrap().iter().find(|e| e["family"] == family).unwrap()["slope"].as_f64().unwrap()
    };
    assert!((slope("density_phase") + 0.5).abs() < 0.05);
    assert!(slope("density_superposition").abs() < 0.05);
    assert!((slope("theorem_iid") + 0.5).abs() < 0.02);
    assert!(slope("theorem_two_branch").abs() < 0.05);
    assert!((slope("pair_current") + 0.5).abs() < 0.05);
    assert_eq!(rows(&tmp.path().join("density_phase.csv")).len(), 3);
}

#[test]
fn scaling_rejects_short_n_lists() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"scaling": {"n_values": []}}"#);
    let out = symbreak(&["--config", &cfg, "scaling"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = symbreak(&["scaling", "--n-values", "10,20"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("exponents.json").exists());
}

#[test]
fn bcs_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"bcs": {"convergence": [{"modes": 2000, "half_bandwidth": 50.0}, {"modes": 20000, "half_bandwidth": 1000.0}],
            "current_points": 5, "projection_grid": 12, "measured_theta": 1.0}}"#,
    );
    ok(&["--config", &cfg, "bcs"], tmp.path());
    let ratio = column(&tmp.path().join("critical_current.csv"), 5);
    assert!((ratio.last().unwrap() - 1.0).abs() <= 0.01, "{ratio:?}");

    let jp = tmp.path().join("current_phase.csv");
    let (theta, current) = (column(&jp, 0), column(&jp, 1));
    let js = current.iter().cloned().fold(0.0, f64::max);
    assert_eq!(theta.len(), 5);
    assert_eq!(current[0], 0.0);
    assert!(current[2].abs() < 1e-12 * js && (theta[2] - PI).abs() < 1e-12);

    let proj = tmp.path().join("projection.csv");
    let rel = column(&proj, 2);
    assert_eq!(rel.len(), 12);
    // measured 1.0 lands in the bin at 2π/12·2
    assert!(rel.iter().all(|r| (r - PI / 3.0).abs() < 1e-12));
    let p = column(&tmp.path().join("outcome_distribution.csv"), 1);
    assert!(p.iter().all(|x| (x - 1.0 / 12.0).abs() < 1e-12));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"seed": 5, "fringe": {"n": 3, "points": 16}}"#);
    ok(&["--config", &cfg, "--seed", "9", "fringe", "--n", "4"], tmp.path());
    let text = std::fs::read_to_string(tmp.path().join("no_fringe.csv")).unwrap();
    assert!(text.contains("# seed: 9\n"));
    assert!(text.contains("\"n\":4"));
    assert!(text.contains("\"points\":16"));
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"interferometer": {}}"#);
    assert_eq!(symbreak(&["--config", &cfg, "fringe"], tmp.path()).status.code(), Some(2));
    let cfg = write_config(tmp.path(), r#"{"fringe": {"model": {"kind": "ring", "wavenumber": 1.0, "length": 1.0}}}"#);
    assert_eq!(symbreak(&["--config", &cfg, "fringe"], tmp.path()).status.code(), Some(2));
    let cfg = write_config(tmp.path(), r#"{"detect": {"n": 10, "detections": 21}}"#);
    assert_eq!(symbreak(&["--config", &cfg, "detect"], tmp.path()).status.code(), Some(2));
    assert_eq!(symbreak(&["--threads", "0", "bcs"], tmp.path()).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_symbreak"))
        .args(["fringe", "--out-dir"])
        .arg(tmp.path())
        .env("SYMBREAK_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
