//! End-to-end checks of the `lv` binary: exit codes, output formats, and
//! reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lv"))
}

fn write_model(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const COEXIST: &str = r#"{"a":[4.0,3.0],"b":[1.5,1.0],"c":[1.0,0.5],
"alpha":[0.25,0.5],"beta":[0.5,0.25],"gamma":[0.0,0.0]}"#;

const BISTABLE: &str = r#"{"a":[2.0,2.0],"b":[1.0,1.0],"c":[2.0,2.0],
"alpha":[1.0,1.0],"beta":[1.0,1.0],"gamma":[0.0,0.0]}"#;

const SWITCHED: &str = r#"{"regimes":[
{"a":[4.0,3.0],"b":[1.5,1.0],"c":[1.0,0.5]},
{"a":[2.0,2.5],"b":[1.0,1.2],"c":[0.7,0.9]}],
"switching":[1.0,2.0]}"#;

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_coexistence_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", COEXIST);
    let out = lv().args(["classify", "--json", "--model"]).arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["stochastic"]["regime"], "Coexist");
    assert_eq!(v["stochastic"]["theorem"], "2.1");
    let l1 = v["stochastic"]["lambda1"].as_f64().unwrap();
    assert!((l1 - 1.526_317_332_443_868_5).abs() < 1e-8);
    let eq = v["deterministic"]["equilibrium"].as_array().unwrap();
    assert!((eq[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((eq[1].as_f64().unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn classify_bistable_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", BISTABLE);
    let out = lv().args(["classify", "--json", "--model"]).arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["stochastic"]["regime"], "BistableExclusion");
    assert_eq!(v["stochastic"]["theorem"], "2.3");
}

#[test]
fn invalid_coefficient_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        dir.path(),
        "bad.json",
        r#"{"a":[4.0,3.0],"b":[0.0,1.0],"c":[1.0,0.5],
            "alpha":[0.25,0.5],"beta":[0.5,0.25],"gamma":[0.0,0.0]}"#,
    );
    let out = lv().args(["classify", "--model"]).arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("b1"), "stderr should name b1: {err}");
}

#[test]
fn huge_tolerance_is_a_critical_case() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", COEXIST);
    let out = lv()
        .args(["classify", "--tol", "10", "--json", "--model"])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["stochastic"]["regime"], "Unclassified");
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", COEXIST);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let status = lv()
            .args(["simulate", "--seed", "7", "--T", "2", "--stride", "10", "--model"])
            .arg(&model)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(dir.path().join("a.csv.manifest.json").exists());
    let header = fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("t,x,y\n"));
}

#[test]
fn zero_step_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", COEXIST);
    let out = lv()
        .args(["simulate", "--h", "0", "--model"])
        .arg(&model)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pdmp_simulation_has_regime_column_and_jump_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "sw.json", SWITCHED);
    let out_csv = dir.path().join("run.csv");
    let status = lv()
        .args(["simulate", "--pdmp", "--T", "5", "--h", "0.01", "--model"])
        .arg(&model)
        .arg("--out")
        .arg(&out_csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("t,x,y,regime\n"));
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 4);
    let jumps = fs::read_to_string(dir.path().join("run.jumps.csv")).unwrap();
    assert!(jumps.starts_with("t_jump,from,to\n"));
}

#[test]
fn montecarlo_report_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", BISTABLE);
    let run = |out: &Path, threads: &str| {
        let status = lv()
            .env("LV_THREADS", threads)
            .args([
                "montecarlo", "--n", "24", "--T", "10", "--stride", "10", "--floor", "1e-6",
                "--seed", "3", "--model",
            ])
            .arg(&model)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run(&a, "1");
    run(&b, "4");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    for key in [
        "n_paths", "p_hat", "q_hat", "neither", "ci_p", "ci_q", "mean_slope_x", "mean_slope_y",
        "floor", "horizon", "seed",
    ] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    let p = v["p_hat"].as_f64().unwrap();
    let q = v["q_hat"].as_f64().unwrap();
    let neither = v["neither"].as_f64().unwrap();
    assert_eq!(p + q + neither, 1.0);
}

#[test]
fn manifest_replay_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", COEXIST);
    let first = dir.path().join("first.csv");
    assert_eq!(
        lv().args(["simulate", "--seed", "11", "--T", "1", "--model"])
            .arg(&model)
            .arg("--out")
            .arg(&first)
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("first.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "simulate");
    let args = &manifest["args"];
    let replay = dir.path().join("replay.csv");
    assert_eq!(
        lv().args(["simulate"])
            .arg("--model")
            .arg(args["model"].as_str().unwrap())
            .arg("--T")
            .arg(args["T"].to_string())
            .arg("--h")
            .arg(args["h"].to_string())
            .arg("--seed")
            .arg(args["seed"].to_string())
            .arg("--stride")
            .arg(args["stride"].to_string())
            .arg("--z0")
            .arg(format!(
                "{},{}",
                args["z0"][0].as_f64().unwrap(),
                args["z0"][1].as_f64().unwrap()
            ))
            .arg("--out")
            .arg(&replay)
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    assert_eq!(fs::read(&first).unwrap(), fs::read(&replay).unwrap());
}

#[test]
fn pdmp_lambdas_reports_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "sw.json", SWITCHED);
    let out = lv()
        .args(["pdmp-lambdas", "--T", "50", "--h", "0.01", "--json", "--model"])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["lambda1_bar"].is_f64());
    assert!(v["stderr1"].as_f64().unwrap() >= 0.0);
}

#[test]
fn malformed_model_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "bad.json", r#"{"a":[1.0]}"#);
    let out = lv().args(["classify", "--model"]).arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
