use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bvquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvquad"))
        .args(args)
        .env_remove("BVQUAD_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn rule_prints_gauss_nodes() {
    let out = bvquad(&["rule", "--family", "gauss", "--weight", "legendre", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["nodes"][0].as_f64(), Some(-0.5773502691896257));
    assert_eq!(v["nodes"][1].as_f64(), Some(0.5773502691896257));
    assert_eq!(v["family"], "gauss");
}

#[test]
fn rule_prints_simpson_weights_for_three_point_cc() {
    let out = bvquad(&["rule", "--family", "cc", "--weight", "legendre", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let w: Vec<f64> = stdout_json(&out)["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (a, b) in w.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn construction_failures_exit_one() {
    let out = bvquad(&["rule", "--family", "kronrod", "--weight", "ultraspherical:2.0", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported-lambda"));
    let out = bvquad(&["rule", "--family", "compound:simpson", "--weight", "chebyshev1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bvquad(&[]).status.code(), Some(2));
    assert_eq!(bvquad(&["rule", "--family", "lobatto", "--n", "3"]).status.code(), Some(2));
    assert_eq!(bvquad(&["rule", "--family", "gauss"]).status.code(), Some(2));
    assert_eq!(bvquad(&["rule", "--family", "gauss", "--n", "x"]).status.code(), Some(2));
    let out = bvquad(&["converge", "--family", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(bvquad(&["converge", "--family", "gauss", "--n", "8:4:2"]).status.code(), Some(2));
    assert_eq!(bvquad(&["--help"]).status.code(), Some(0));
}

#[test]
fn exactness_examples() {
    let run = |args: &[&str]| -> usize {
        let out = bvquad(args);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap().trim().parse().unwrap()
    };
    assert_eq!(run(&["exactness", "--family", "gauss", "--n", "3"]), 5);
    assert!(run(&["exactness", "--family", "kronrod", "--n", "2"]) >= 7);
    assert_eq!(run(&["exactness", "--family", "cc", "--n", "2"]), 1);
}

#[test]
fn peano_checks_freud() {
    let out = bvquad(&["peano", "--family", "gauss", "--weight", "legendre", "--n", "16", "--s", "2", "--check-freud"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let sup = v["sup_norm"].as_f64().unwrap();
    let bound = v["freud_bound"].as_f64().unwrap();
    assert!(sup <= bound);
    assert!((v["ratio"].as_f64().unwrap() - sup / bound).abs() < 1e-18);

    let out = bvquad(&["peano", "--family", "gauss", "--n", "2", "--s", "5"]);
    assert_eq!(out.status.code(), Some(1));

    // compound trapezoid is not positive interpolatory for n > 1
    let out = bvquad(&["peano", "--family", "compound:trapezoid", "--n", "4", "--s", "1", "--check-freud"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn peano_from_rule_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("simpson.json");
    let out = bvquad(&["rule", "--family", "compound:simpson", "--n", "1"]);
    std::fs::write(&path, &out.stdout).unwrap();
    let from_file = bvquad(&["peano", "--rule-file", path.to_str().unwrap(), "--s", "3"]);
    assert_eq!(from_file.status.code(), Some(0));
    let v = stdout_json(&from_file);
    // Simpson's K_3 is -(1 - |t|)^3 (1 + 3|t|) / 72
    assert!((v["sup_norm"].as_f64().unwrap() - 1.0 / 72.0).abs() < 1e-15);
    assert!((v["C_estimate"].as_f64().unwrap() - 1.0 / 72.0).abs() < 1e-15);
    let from_flags = bvquad(&["peano", "--family", "compound:simpson", "--n", "1", "--s", "3"]);
    assert_eq!(from_flags.stdout, from_file.stdout);

    let gauss = bvquad(&["rule", "--family", "gauss", "--weight", "chebyshev2", "--n", "9"]);
    let path = dir.path().join("g.json");
    std::fs::write(&path, &gauss.stdout).unwrap();
    let again = bvquad(&["rule", "--rule-file", path.to_str().unwrap()]);
    assert_eq!(again.stdout, gauss.stdout);
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn converge_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("a");
    let args = |d: &str| {
        vec![
            "converge".to_string(),
            "--family".into(),
            "gauss,cc".into(),
            "--function".into(),
            "truncpower:0.3:2".into(),
            "--n".into(),
            "4:1024:2".into(),
            "--output-dir".into(),
            d.to_string(),
            "--format".into(),
            "json,csv,svg".into(),
        ]
    };
    let a: Vec<String> = args(out_dir.to_str().unwrap());
    let out = bvquad(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&read(&out_dir, "summary.json")).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 2);
    assert!(summary.as_array().unwrap().iter().all(|r| r["pass"] == true));
    let csv = read(&out_dir, "convergence.csv");
    assert!(csv.starts_with("family,function,weight,n,error,kernel_bound,freud_bound\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
    assert!(out_dir.join("gauss__truncpower_0.3_2.svg").exists());
    assert!(read(&out_dir, "clenshaw_curtis__truncpower_0.3_2.svg").starts_with("<svg"));

    let other = dir.path().join("b");
    let b: Vec<String> = args(other.to_str().unwrap());
    bvquad(&b.iter().map(String::as_str).collect::<Vec<_>>());
    for name in ["summary.json", "convergence.csv", "gauss__truncpower_0.3_2.svg"] {
        assert_eq!(read(&out_dir, name), read(&other, name));
    }
}

#[test]
fn converge_compound_reports_c_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = bvquad(&[
        "converge",
        "--family",
        "compound:simpson",
        "--function",
        "abspower:0.3:3",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    let c = summary[0]["C_estimate"].as_f64().unwrap();
    assert!((c - 1.0 / 72.0).abs() < 1e-15);
}

#[test]
fn config_file_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"families":["polya"],"functions":["truncpower:0.3"],"s_list":[1,2],"n_min":4,"n_max":1024,"geometric_ratio":2,"formats":["csv"]}"#,
    )
    .unwrap();
    let env_dir = dir.path().join("env");
    let out = Command::new(env!("CARGO_BIN_EXE_bvquad"))
        .args(["converge", "--config", cfg.to_str().unwrap(), "--family", "filippi"])
        .env("BVQUAD_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&env_dir, "convergence.csv");
    assert!(csv.lines().skip(1).all(|l| l.starts_with("filippi,truncpower:0.3:")));
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
    assert!(!env_dir.join("summary.json").exists());
}

#[test]
fn failing_checks_exit_three() {
    // On a short x2 grid the fitted order of Filippi's rule on (x - 0.3)_+ is
    // about -1.5, outside the quarter-order tolerance of -2.
    let dir = tempfile::tempdir().unwrap();
    let out = bvquad(&[
        "converge",
        "--family",
        "filippi",
        "--function",
        "truncpower:0.3:1",
        "--n",
        "8:256:2",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("FAIL filippi truncpower:0.3:1"));
    // the reports are still written
    assert!(dir.path().join("convergence.csv").exists());
}
