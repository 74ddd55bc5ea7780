//! End-to-end checks of the binary: schemas, exit codes, selftests, and
//! byte-level determinism across thread counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn wmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = wmsim(args);
    assert!(
        out.status.success(),
        "wmsim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn dwell_corr_schema_and_cross_method_agreement() {
    let analytic = stdout(&[
        "dwell-corr", "--eps", "1", "--tau", "1", "--kt", "0.1", "--t1", "0", "--t2", "1",
        "--t3", "3", "--method", "analytic",
    ]);
    let (header, rows) = parse_csv(&analytic);
    assert_eq!(
        header,
        vec!["eps", "tau", "kt", "t1", "t2", "t3", "method", "g", "samples", "value", "stderr"]
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][6], "analytic");
    assert_eq!(rows[0][10], ""); // stderr empty for non-MC
    let v_analytic: f64 = rows[0][9].parse().unwrap();

    let superop = stdout(&[
        "dwell-corr", "--eps", "1", "--tau", "1", "--kt", "0.1", "--t1", "0", "--t2", "1",
        "--t3", "3", "--method", "superop",
    ]);
    let (_, rows) = parse_csv(&superop);
    let v_superop: f64 = rows[0][9].parse().unwrap();
    assert!((v_analytic - v_superop).abs() < 1e-10);
}

#[test]
fn dwell_asym_schema_and_witness() {
    let out = stdout(&["dwell-asym"]);
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        vec!["label", "a1", "a2", "a3", "q_forward", "q_reversed", "delta"]
    );
    assert_eq!(rows.len(), 9); // 2×2×2 outcomes + delta_T summary
    let last = rows.last().unwrap();
    assert_eq!(last[0], "delta_T");
    let delta_t: f64 = last[6].parse().unwrap();
    assert!(delta_t > 0.01);
}

#[test]
fn dot_s3_grid_schema_and_zero_lines() {
    let out = stdout(&[
        "dot-s3", "--eps", "0.5", "--gamma", "1", "--kt", "0", "--grid", "11", "--wmax", "3",
        "--tol", "1e-8",
    ]);
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        vec!["omega", "omega_p", "s3_re", "s3_im", "err_est", "evals"]
    );
    assert_eq!(rows.len(), 121);
    for row in &rows {
        let w: f64 = row[0].parse().unwrap();
        let wp: f64 = row[1].parse().unwrap();
        let im: f64 = row[3].parse().unwrap();
        if w == 0.0 || wp == 0.0 || (w + wp).abs() < 1e-12 {
            assert!(im.abs() <= 1e-7, "Im at ({w}, {wp}) = {im}");
        }
        let evals: i64 = row[5].parse().unwrap();
        assert!(evals > 0);
    }
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir = std::env::temp_dir();
    let base: PathBuf = dir.join("wmsim_threads");
    let args_for = |threads: &str, path: &str, format: &str| {
        vec![
            "classical-sym".to_string(),
            "--trajectories".into(),
            "20000".into(),
            "--seed".into(),
            "42".into(),
            "--threads".into(),
            threads.into(),
            "--format".into(),
            format.into(),
            "--out".into(),
            path.into(),
        ]
    };
    for format in ["csv", "json"] {
        let p1 = format!("{}_1.{format}", base.display());
        let p2 = format!("{}_2.{format}", base.display());
        let a1: Vec<String> = args_for("1", &p1, format);
        let a2: Vec<String> = args_for("2", &p2, format);
        let s1: Vec<&str> = a1.iter().map(String::as_str).collect();
        let s2: Vec<&str> = a2.iter().map(String::as_str).collect();
        let _ = stdout(&s1);
        let _ = stdout(&s2);
        let b1 = std::fs::read(&p1).unwrap();
        let b2 = std::fs::read(&p2).unwrap();
        assert_eq!(b1, b2, "{format} outputs differ between thread counts");
        let _ = std::fs::remove_file(&p1);
        let _ = std::fs::remove_file(&p2);
    }
}

#[test]
fn json_output_carries_metadata() {
    let out = stdout(&["junction", "--format", "json", "--seed", "7"]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["subcommand"], "junction");
    assert_eq!(doc["meta"]["seed"], 7);
    assert!(doc["meta"]["version"].is_string());
    assert!(doc["columns"].as_array().unwrap().len() == 6);
    assert!(!doc["rows"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    // 0: success
    assert_eq!(wmsim(&["junction"]).status.code(), Some(0));
    // 2: unknown flag / usage
    assert_eq!(wmsim(&["junction", "--bogus"]).status.code(), Some(2));
    assert_eq!(wmsim(&["no-such-command"]).status.code(), Some(2));
    // 2: flag validation against module preconditions
    assert_eq!(
        wmsim(&["dwell-corr", "--kt", "-2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wmsim(&["dot-s3", "--grid", "1"]).status.code(),
        Some(2)
    );
    // 3: numerical non-convergence (tolerance below what the budget allows)
    assert_eq!(
        wmsim(&["dot-s3", "--omega", "1", "--omega-p", "1", "--tol", "1e-15"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn every_subcommand_has_a_selftest() {
    for cmd in [
        "dwell-corr",
        "dwell-asym",
        "dot-s3",
        "junction",
        "classical-sym",
        "disturbance-scan",
        "smoothing-scan",
    ] {
        let out = wmsim(&[cmd, "--selftest"]);
        assert!(
            out.status.success(),
            "{cmd} selftest failed: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("PASS"), "{cmd}: {text}");
        assert!(!text.contains("FAIL"), "{cmd}: {text}");
    }
}

#[test]
fn smoothing_scan_decays_monotonically() {
    let out = stdout(&["smoothing-scan"]);
    let (_, rows) = parse_csv(&out);
    let deltas: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    for pair in deltas.windows(2) {
        assert!(pair[1] < pair[0], "not monotone: {deltas:?}");
    }
    let ratio: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!(ratio < 0.1);
}

#[test]
fn quantum_disturbance_scan_slope_in_window() {
    let out = stdout(&["disturbance-scan", "--domain", "quantum"]);
    let (_, rows) = parse_csv(&out);
    let fit = rows.iter().find(|r| r[0] == "fit").unwrap();
    let slope: f64 = fit[3].parse().unwrap();
    assert!((1.9..=2.1).contains(&slope), "slope {slope}");
}
