use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bridgex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bridgex"))
        .args(args)
        .env_remove("BRIDGEX_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Deterministic small design: y depends on x1 and x2 only.
fn write_csv(dir: &Path, name: &str, n: usize, shift: f64) -> PathBuf {
    let mut text = String::from("x1,x2,x3,x4,y\n");
    for i in 0..n {
        let t = i as f64 + shift;
        let x1 = (0.7 * t).sin() * 2.0;
        let x2 = (1.3 * t + 0.4).cos();
        let x3 = ((0.37 * t).sin() * 5.0).fract();
        let x4 = (t * 0.11).cos() + 0.3 * (t * 2.9).sin();
        let y = 3.0 * x1 - 2.0 * x2 + 0.1 * (5.1 * t).sin() + 1.0;
        text += &format!("{x1},{x2},{x3},{x4},{y}\n");
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let args = |p: &Path| {
        vec![
            "simulate".to_owned(),
            "--scenario".into(),
            "1".into(),
            "--methods".into(),
            "ols".into(),
            "--replicates".into(),
            "1".into(),
            "--seed".into(),
            "7".into(),
            "--output".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let a: Vec<String> = args(&out);
    let refs: Vec<&str> = a.iter().map(String::as_str).collect();
    assert_eq!(code(&bridgex(&refs)), 0);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(code(&bridgex(&refs)), 0);
    assert_eq!(first, std::fs::read(&out).unwrap());
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["config"]["scenario_id"], 1);
    let ols = &v["report"]["methods"][0];
    assert_eq!(ols["pmse"].as_array().unwrap().len(), 1);
    assert!(ols["pmse_sd"].is_null());
}

#[test]
fn simulate_csv_has_one_row_per_method_and_covariate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let o = bridgex(&[
        "simulate",
        "--scenario",
        "1",
        "--methods",
        "ols,lasso",
        "--replicates",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--output",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,covariate,frequency");
    assert_eq!(lines.len(), 1 + 2 * 30);
    assert!(lines[1].starts_with("ols,1,"));
}

#[test]
fn screen_keeps_a_column_equal_to_the_response() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("a,b,y\n");
    let ys = [1.0, 3.0, -2.0, 0.5, 4.0, -1.0, 2.0, 0.0];
    for (i, y) in ys.iter().enumerate() {
        text += &format!("{},{},{}\n", y, (i as f64 * 1.7).sin(), y);
    }
    let path = dir.path().join("s.csv");
    std::fs::write(&path, text).unwrap();
    // After standardisation a = sqrt(mean((y - ybar)^2)).
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let a = (ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n).sqrt();
    let c = (4.0 / 3.0) * (2.0f64 / 3.0).sqrt();
    let lambda = 0.5 * c * a.powf(1.5) * n;
    let out = dir.path().join("o.json");
    let o = bridgex(&[
        "screen",
        "--input",
        path.to_str().unwrap(),
        "--response",
        "y",
        "--lambda",
        &lambda.to_string(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    let selected: Vec<&str> = v["screen"]["selected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert!(selected.contains(&"a"));
    assert!((floats(&v["screen"]["marginal_stat"])[0] - a).abs() < 1e-12);
}

#[test]
fn bridge_at_zero_penalty_matches_ols() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "d.csv", 40, 0.0);
    let run = |method: &str, out: &str| {
        let out = dir.path().join(out);
        let o = bridgex(&[
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--response",
            "y",
            "--method",
            method,
            "--lambda",
            "0",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        floats(&read_json(&out)["fit"]["coefficients"])
    };
    let bridge = run("bridge", "b.json");
    let ols = run("ols", "o.json");
    for (b, o) in bridge.iter().zip(&ols) {
        assert!((b - o).abs() <= 5.0 * 1e-4, "{b} vs {o}");
    }
}

#[test]
fn fit_reports_raw_scale_model_and_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "d.csv", 60, 0.0);
    let out = dir.path().join("o.json");
    let o = bridgex(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--response",
        "y",
        "--method",
        "ols",
        "--se",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = read_json(&out);
    let raw = floats(&v["fit"]["raw_coefficients"]);
    assert!((raw[0] - 3.0).abs() < 0.05 && (raw[1] + 2.0).abs() < 0.05);
    assert!((v["fit"]["intercept"].as_f64().unwrap() - 1.0).abs() < 0.1);
    let ses = v["fit"]["standard_errors"]["coefficients"].as_array().unwrap();
    assert_eq!(ses.len(), 4);
    for e in ses {
        let (lo, hi) = (e["lower"].as_f64().unwrap(), e["upper"].as_f64().unwrap());
        assert!(lo < e["estimate"].as_f64().unwrap() && e["estimate"].as_f64().unwrap() < hi);
    }
}

#[test]
fn usage_errors_exit_one_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "d.csv", 20, 0.0);
    let out = dir.path().join("never.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["fit", "--bogus"],
        vec!["fit", "--input", csv.to_str().unwrap(), "--response", "nope", "--method", "ols"],
        vec![
            "screen",
            "--input",
            csv.to_str().unwrap(),
            "--response",
            "y",
            "--lambda",
            "1",
            "--gamma",
            "1.5",
        ],
        vec!["simulate", "--scenario", "9", "--replicates", "1"],
        vec!["simulate", "--scenario", "1", "--methods", "ols,svm"],
        vec!["diagnose", "--input", csv.to_str().unwrap(), "--response", "y", "--selected", "x9"],
    ];
    for mut args in cases {
        args.extend(["--output", out.to_str().unwrap()]);
        let o = bridgex(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists(), "{args:?} wrote a report");
    }
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,y\n1,2\nabc,3\n4,5\n").unwrap();
    let constant = dir.path().join("const.csv");
    std::fs::write(&constant, "x1,x2,y\n1,0,2\n1,1,3\n1,2,5\n").unwrap();
    for path in [&bad, &constant, &dir.path().join("missing.csv")] {
        let o = bridgex(&[
            "fit",
            "--input",
            path.to_str().unwrap(),
            "--response",
            "y",
            "--method",
            "ols",
        ]);
        assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn non_convergence_exits_three_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "d.csv", 40, 0.0);
    let out = dir.path().join("o.json");
    let o = bridgex(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--response",
        "y",
        "--method",
        "bridge",
        "--lambda",
        "4",
        "--max-iter",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(read_json(&out)["fit"]["converged"], false);
}

#[test]
fn tune_twostep_and_diagnose_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_csv(dir.path(), "t.csv", 50, 0.0);
    let valid = write_csv(dir.path(), "v.csv", 50, 1000.0);
    let out = dir.path().join("tune.json");
    let o = bridgex(&[
        "tune",
        "--input",
        train.to_str().unwrap(),
        "--valid",
        valid.to_str().unwrap(),
        "--response",
        "y",
        "--method",
        "lasso",
        "--lambda",
        "0.01:100:9:log",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(floats(&v["lambda_grid"]).len(), 9);
    assert!(floats(&v["lambda_grid"]).contains(&v["best_lambda"].as_f64().unwrap()));

    let out = dir.path().join("two.json");
    let o = bridgex(&[
        "twostep",
        "--input",
        train.to_str().unwrap(),
        "--response",
        "y",
        "--lambda",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    let coef = floats(&v["fit"]["coefficients"]);
    let kept = v["screen"]["selected_indices"].as_array().unwrap();
    for (j, b) in coef.iter().enumerate() {
        if !kept.iter().any(|k| k.as_u64() == Some(j as u64)) {
            assert_eq!(*b, 0.0);
        }
    }

    let out = dir.path().join("diag.json");
    let o = bridgex(&[
        "diagnose",
        "--input",
        train.to_str().unwrap(),
        "--response",
        "y",
        "--selected",
        "x1,x2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let d = &read_json(&out)["diagnostics"];
    let rho_min = d["rho_min"].as_f64().unwrap();
    assert!(rho_min >= -1e-9 && rho_min <= d["tau_min"].as_f64().unwrap() + 1e-9);
}
