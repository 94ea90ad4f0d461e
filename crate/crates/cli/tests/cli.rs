//! Black-box tests of the `pilotbox` binary: flags, file formats, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn pilotbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotbox"))
        .args(args)
        .env_remove("PILOTBOX_THREADS")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad stdout JSON: {e}\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn eigenstate_paper_n_has_single_interior_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.csv");
    let result = pilotbox(&[
        "eigenstate", "--paper-n", "1", "--length", "1", "--points", "8193", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header, vec!["x", "re", "im", "density"]);
    assert_eq!(rows.len(), 8193);
    let interior_zeros: Vec<f64> = rows[1..rows.len() - 1]
        .iter()
        .filter(|r| r[3] < 1e-30)
        .map(|r| r[0])
        .collect();
    assert_eq!(interior_zeros.len(), 1, "zeros at {interior_zeros:?}");
    assert!((interior_zeros[0] - 0.5).abs() < 1e-12);
    // summary reports the mapped standard mode
    let summary = stdout_json(&result);
    assert_eq!(summary["mode"], 2);
}

#[test]
fn eigenstate_mode_one_density_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.csv");
    let result = pilotbox(&["eigenstate", "--mode", "1", "--points", "4097", "--out", out.to_str().unwrap()]);
    assert!(result.status.success());
    let (_, rows) = read_csv(&out);
    let n = rows.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max((rows[i][3] - rows[n - 1 - i][3]).abs());
    }
    assert!(worst <= 1e-12, "asymmetry {worst}");
}

#[test]
fn eigenstate_mode_zero_is_usage_error() {
    let result = pilotbox(&["eigenstate", "--mode", "0"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(!result.stderr.is_empty());
}

#[test]
fn qpotential_summary_and_masking() {
    let result = pilotbox(&["qpotential", "--mode", "1", "--points", "8192"]);
    assert!(result.status.success());
    let summary = stdout_json(&result);
    assert!(summary["max_rel_err"].as_f64().unwrap() <= 1e-5);

    // mode 2 on an odd grid has its node exactly at x = 0.5; that row is masked out
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let result = pilotbox(&[
        "qpotential", "--mode", "2", "--points", "8193", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let (_, rows) = read_csv(&out);
    assert!(rows.iter().all(|r| (r[0] - 0.5).abs() > 1e-9));
    let summary = stdout_json(&result);
    assert!(summary["masked_fraction"].as_f64().unwrap() > 0.0);
}

#[test]
fn qpotential_synthetic_uniform_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let result = pilotbox(&["qpotential", "--synthetic-uniform", "--out", out.to_str().unwrap()]);
    assert!(result.status.success());
    let (header, rows) = read_csv(&out);
    let q_col = header.iter().position(|h| h == "Q").unwrap();
    assert!(rows.iter().all(|r| r[q_col] == 0.0));
}

#[test]
fn evolve_stationary_state_keeps_density_and_norm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("evo.json");
    let result = pilotbox(&[
        "evolve", "--terms", "1:1,0", "--points", "513", "--dt", "1e-3", "--steps", "200",
        "--stride", "100", "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let frames = doc["frames"].as_array().unwrap();
    let first = &frames[0];
    let last = &frames[frames.len() - 1];
    let density = |f: &serde_json::Value, i: usize| {
        let re = f["re"][i].as_f64().unwrap();
        let im = f["im"][i].as_f64().unwrap();
        re * re + im * im
    };
    for i in 0..513 {
        assert!((density(first, i) - density(last, i)).abs() < 1e-8);
    }
    let summary = stdout_json(&result);
    for norm in summary["norms"].as_array().unwrap() {
        assert!((norm.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn equivariance_reports_ks_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ks.csv");
    let result = pilotbox(&[
        "equivariance", "--mode", "1", "--points", "513", "--dt", "1e-3", "--steps", "100",
        "--stride", "50", "--count", "2000", "--seed", "3", "--dt-traj", "1e-2",
        "--ks-times", "0.0,0.1", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, vec!["time", "statistic", "sample_count"]);
    assert_eq!(rows.len(), 2);
    // stationary state: sampling-level KS at both times
    for row in &rows {
        assert!(row[1] <= 1.63 / (2000f64).sqrt(), "KS {row:?}");
        assert_eq!(row[2], 2000.0);
    }
}

#[test]
fn quark_defaults_match_scale_estimate() {
    let result = pilotbox(&["quark"]);
    assert!(result.status.success());
    let report = stdout_json(&result);
    let p = report["momentum"].as_f64().unwrap();
    assert!((p - 197.3269804).abs() < 1e-9);
    assert!((p - 200.0).abs() / 200.0 < 0.05);
    assert_eq!(report["nonrelativistic_questionable"], true);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mode": 3, "points": 1025}"#).unwrap();

    let result = pilotbox(&["eigenstate", "--config", cfg.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(stdout_json(&result)["mode"], 3);
    assert_eq!(stdout_json(&result)["points"], 1025);

    // explicit flag wins
    let result = pilotbox(&["eigenstate", "--config", cfg.to_str().unwrap(), "--mode", "2"]);
    assert!(result.status.success());
    assert_eq!(stdout_json(&result)["mode"], 2);

    // unknown keys are rejected
    std::fs::write(&cfg, r#"{"mode": 3, "wavelength": 2}"#).unwrap();
    let result = pilotbox(&["eigenstate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn conflicting_state_flags_are_usage_errors() {
    let result = pilotbox(&["trajectories", "--terms", "1:1,0", "--mode", "1"]);
    assert_eq!(result.status.code(), Some(1));
    let result = pilotbox(&["eigenstate", "--mode", "1", "--paper-n", "1"]);
    assert_eq!(result.status.code(), Some(1));
    let result = pilotbox(&["evolve", "--terms", "1:bogus"]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn thread_env_var_is_validated() {
    let result = Command::new(env!("CARGO_BIN_EXE_pilotbox"))
        .args(["quark"])
        .env("PILOTBOX_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));

    let result = Command::new(env!("CARGO_BIN_EXE_pilotbox"))
        .args(["quark"])
        .env("PILOTBOX_THREADS", "2")
        .output()
        .unwrap();
    assert!(result.status.success());
}
