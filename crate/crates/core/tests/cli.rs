use std::process::{Command, Output};

use serde_json::Value;

fn nogo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nogo"))
        .args(args)
        .env_remove("NOGO_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn contrast_deterministic_reports_contradiction() {
    let out = nogo(&[
        "contrast",
        "--state",
        "0,0,1",
        "--model",
        "deterministic",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let results = &v["results"];
    assert!((results["quantum_value"].as_f64().unwrap() - 4.1887902).abs() < 1e-7);
    assert!((results["hv_value"].as_f64().unwrap() - 12.5663706).abs() < 1e-7);
    assert_eq!(results["contradiction"], true);
    assert_eq!(
        results["verdict"],
        "propositions jointly inconsistent; gap ratio 3.000"
    );
    assert_eq!(results["proposition_flags"]["D"], "violated");
    assert_eq!(
        results["bounds"]["hv"].as_f64(),
        Some(4.0 * std::f64::consts::PI)
    );
    assert_eq!(v["command"], "contrast");
    assert_eq!(v["config"]["model"], "deterministic");
    assert_eq!(v["metadata"]["grid"], serde_json::json!([8, 16]));
    assert!(v["metadata"]["rng_name"]
        .as_str()
        .unwrap()
        .contains("ChaCha8"));
}

#[test]
fn verify_quantum_maximally_mixed() {
    let out = nogo(&["verify-quantum", "--state", "0,0,0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["quantum_value"].as_f64(), Some(0.0));
    assert_eq!(v["results"]["passed"], true);
    let checks = v["results"]["checks"].as_array().unwrap();
    let bound = checks
        .iter()
        .find(|c| c["check"] == "quantum_bound")
        .unwrap();
    assert_eq!(bound["passed"], true);
}

#[test]
fn verify_hv_sign_model_matches_quantum_maximum() {
    let out = nogo(&[
        "verify-hv",
        "--model",
        "ks",
        "--state",
        "0,0,1",
        "--samples",
        "1000000",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    let hv = v["results"]["hv_value"].as_f64().unwrap();
    let four_sigma = v["results"]["errors_sigma"]["four_sigma"].as_f64().unwrap();
    assert!(four_sigma > 0.0);
    assert!(
        (hv - 4.0 * std::f64::consts::PI / 3.0).abs() <= four_sigma,
        "{hv} ± {four_sigma}"
    );
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn verify_hv_deterministic_exits_one() {
    let out = nogo(&["verify-hv", "--model", "deterministic"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"));
    assert!(text.contains("distribution_rule"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["contrast", "--state", "0,0"],
        vec!["contrast", "--model", "bohm"],
        vec!["contrast", "--format", "yaml"],
        vec!["contrast", "--grid", "1,8"],
        vec!["verify-quantum", "--state", "0,0,2"],
        vec!["not-a-command"],
    ] {
        let out = nogo(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(nogo(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = nogo(&["lemma-check", "--output", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir"));
}

#[test]
fn output_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("contrast.csv");
    let out = nogo(&[
        "contrast",
        "--model",
        "deterministic",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("kind,name,value,index,theta,phi,weight,quantum,hv_mean,hv_std_error")
    );
    assert!(csv.contains("summary,contradiction,true"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("node,")).count(), 128);
}

#[test]
fn seed_comes_from_environment_unless_flag_given() {
    let with_env = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_nogo"))
            .args(args)
            .env("NOGO_SEED", "1234")
            .output()
            .unwrap();
        json(&out)["metadata"]["seed"].as_u64().unwrap()
    };
    assert_eq!(with_env(&["lemma-check", "--format", "json"]), 1234);
    assert_eq!(
        with_env(&["lemma-check", "--format", "json", "--seed", "5"]),
        5
    );
}

#[test]
fn custom_file_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(
        &path,
        r#"{
            "directions": [[0.0, 0.0], [3.141592653589793, 0.0]],
            "points": [
                {"point_weight": 0.5, "outcomes": {"0": 1, "1": -1}},
                {"point_weight": 0.5, "outcomes": {"0": 1, "1": 1}}
            ]
        }"#,
    )
    .unwrap();
    let out = nogo(&[
        "contrast",
        "--state",
        "0,0,0",
        "--model",
        "custom-file",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    // E = +1 on the upper hemisphere, 0 on the lower: ∫E² = 2π
    let hv = v["results"]["hv_value"].as_f64().unwrap();
    assert!((hv - 2.0 * std::f64::consts::PI).abs() < 1e-12, "{hv}");

    std::fs::write(&path, "{not json").unwrap();
    let bad = nogo(&["contrast", "--model", "custom-file", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn all_suite_with_sign_model() {
    let out = nogo(&[
        "all",
        "--samples",
        "20000",
        "--grid",
        "3,8",
        "--format",
        "json",
    ]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(0), "{v:#}");
    assert_eq!(v["results"]["passed"], true);
    assert_eq!(v["results"]["contradiction"], false);
}
