//! End-to-end checks of the command-line surface: artifact shapes, config
//! precedence, the documented error records and exit codes.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rfgeom")
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().expect("spawn rfgeom")
}

#[test]
fn moments_reports_gaussian_gamma_half() {
    let out = run(&["moments", "--kernel", "gaussian", "--N", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["gamma"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((v["kappa22"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-8);
    assert_eq!(v["N"], 2);
    // moments JSON carries the full documented key set
    for key in [
        "gamma", "kappa", "kappa22", "kappa4", "rho", "ctilde", "c_small", "c_big", "d_big", "N",
        "kernel",
    ] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn moments_d_big_is_null_at_n1() {
    let out = run(&["moments", "--kernel", "marr", "--N", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["d_big"].is_null());
}

#[test]
fn scale_lkcs_threshold_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lkcs = dir.path().join("l.json");
    let out = run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "1", "--domain", "rect:10", "--sigma",
        "0.5,2", "--out", lkcs.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let artifact: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&lkcs).unwrap()).unwrap();
    let values = artifact["lkcs"]["values"].as_array().unwrap();
    assert!((values[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((values[2].as_f64().unwrap() - 7.5).abs() < 1e-9);
    // sidecar exists with timestamp and echoed config
    let sidecar = dir.path().join("l.json.meta.json");
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert!(meta["timestamp_unix"].is_number());
    assert_eq!(meta["config"]["kernel"], "gaussian");

    let thr = run(&["threshold", "--lkcs", lkcs.to_str().unwrap(), "--alpha", "0.05"]);
    assert!(thr.status.success());
    let text = String::from_utf8(thr.stdout).unwrap();
    let u: f64 = text.trim().parse().unwrap();
    assert!(u > 2.0 && u < 4.0, "threshold {u}");
    // printed with six decimals
    assert_eq!(text.trim().split('.').nth(1).unwrap().len(), 6);
}

#[test]
fn eec_curve_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let lkcs = dir.path().join("l.json");
    run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "1", "--domain", "rect:10", "--sigma",
        "0.5,2", "--out", lkcs.to_str().unwrap(),
    ]);
    let csv = dir.path().join("curve.csv");
    let out = run(&[
        "eec", "--lkcs", lkcs.to_str().unwrap(), "--u-grid", "0:5:0.5", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "u,eec");
    assert_eq!(lines.len(), 12); // header + 11 grid points
    // EEC at u = 5 is tiny and positive for this curve
    let last: Vec<&str> = lines[11].split(',').collect();
    let eec5: f64 = last[1].parse().unwrap();
    assert!(eec5 > 0.0 && eec5 < 1e-3);
}

#[test]
fn rotation_artifact_reports_f_integrals() {
    let out = run(&[
        "lkc", "rotation", "--N", "2", "--kernel", "gaussian", "--sigma", "1,2", "--domain",
        "rect:1,1", "--r-samples", "1000", "--seed", "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["D"], 5);
    assert!((v["L_D"].as_f64().unwrap() - 0.022861757667947).abs() < 1e-6);
    assert!(v["standard_errors"]["F_KNm1"].as_f64().unwrap() == 0.0); // closed form at N = 2
    assert_eq!(v["lkcs"]["truncated"], true);
}

#[test]
fn rotation_n3_requires_seed() {
    let out = run(&[
        "lkc", "rotation", "--N", "3", "--kernel", "gaussian", "--sigma", "1,2", "--domain",
        "rect:1,1,1", "--r-samples", "200",
    ]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "ConfigInvalid");
}

#[test]
fn structured_error_records_and_exit_codes() {
    // dimension mismatch: N = 2 kernel over a 1-D domain
    let out = run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "2", "--domain", "rect:10", "--sigma",
        "0.5,2",
    ]);
    assert_eq!(out.status.code(), Some(5));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "DimensionMismatch");
    assert_eq!(err["error"]["exit_code"], 5);

    // degenerate sigma band
    let out = run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "1", "--domain", "rect:10", "--sigma",
        "2,2",
    ]);
    assert_eq!(out.status.code(), Some(7));

    // unknown kernel
    let out = run(&["moments", "--kernel", "box", "--N", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // simulate without a seed
    let out = run(&[
        "simulate", "--kernel", "gaussian", "--N", "1", "--T", "4", "--sigma", "0.5,1", "--u",
        "2", "--reps", "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"kernel": "gaussian", "N": 2, "sigma": "0.5,2", "domain": "ball:2,1.0"}"#,
    )
    .unwrap();
    // config alone
    let out = run(&["--config", cfg.to_str().unwrap(), "moments"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 2);
    // flag overrides the file
    let out = run(&["--config", cfg.to_str().unwrap(), "moments", "--N", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 3);
    assert_eq!(v["config"]["N"], 3); // echo reflects the effective value
}

#[test]
fn simulate_artifact_carries_formula_side_by_side() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("stats.json");
    let csv_path = dir.path().join("stats.csv");
    let out = run(&[
        "simulate", "--kernel", "gaussian", "--N", "1", "--T", "6", "--sigma", "0.5,1.5", "--u",
        "2,3", "--reps", "150", "--seed", "9", "--out", out_path.to_str().unwrap(), "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["thresholds"].as_array().unwrap().len(), 2);
    assert_eq!(v["formula_eec"].as_array().unwrap().len(), 2);
    assert_eq!(v["realizations"], 150);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("u,mean_chi,se_chi,p_sup,formula_eec"));
    assert_eq!(csv.trim().lines().count(), 3);
}

#[test]
fn verify_suite_table_and_failure_free_exit() {
    let out = run(&["verify", "--suite", "gkf", "--seed", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
    assert!(text.contains("0 failed"));
}

#[test]
fn custom_domain_literal_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let geom_path = dir.path().join("geom.json");
    // a DomainGeometry literal for the unit square
    std::fs::write(
        &geom_path,
        r#"{
            "dimension": 2,
            "euclid_lkcs": [1.0, 2.0, 1.0],
            "volume": 1.0,
            "boundary_measure": 4.0,
            "boundary_curvature_integrals": [4.0, 0.0],
            "shape": {"kind": "custom"}
        }"#,
    )
    .unwrap();
    let spec = format!("custom:{}", geom_path.display());
    let out = run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "2", "--domain", &spec, "--sigma",
        "0.5,2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // matches the rect:1,1 result
    let reference = run(&[
        "lkc", "scale", "--kernel", "gaussian", "--N", "2", "--domain", "rect:1,1", "--sigma",
        "0.5,2",
    ]);
    let r: serde_json::Value = serde_json::from_slice(&reference.stdout).unwrap();
    let a = v["lkcs"]["values"].as_array().unwrap();
    let b = r["lkcs"]["values"].as_array().unwrap();
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12);
    }
}
