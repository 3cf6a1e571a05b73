use std::process::{Command, Output};

use matreg::formats::RepSetJson;
use matreg_core::reps::RepSet;
use serde_json::Value;

fn matreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matreg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("matreg-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn sphere_table_starts_with_known_hbar() {
    let out = matreg(&["fuzzy-sphere", "--k", "2..6", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let idx = rdr.headers().unwrap().iter().position(|h| h == "hbar2").unwrap();
    let h2: Vec<f64> = rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect();
    assert_eq!(h2.len(), 5);
    for (got, want) in h2.iter().zip([4.0 / 3.0, 0.5, 4.0 / 15.0]) {
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn empty_or_malformed_ranges_exit_2() {
    assert_eq!(matreg(&["fuzzy-sphere", "--k", "6..2"]).status.code(), Some(2));
    assert_eq!(matreg(&["fuzzy-torus", "--k", "a..b"]).status.code(), Some(2));
    assert_eq!(matreg(&["fuzzy-sphere", "--k", "1..3"]).status.code(), Some(2));
    assert_eq!(matreg(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn torus_identities_and_spans() {
    let out = matreg(&["fuzzy-torus", "--k", "3..8"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for row in report["rows"].as_array().unwrap() {
        let k = row["k"].as_u64().unwrap();
        assert!(row["identity_deviation"].as_f64().unwrap() <= 1e-12);
        assert_eq!(row["algebra_dim"].as_u64().unwrap(), k * k);
    }
    let slope = report["scan"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.3, "{slope}");

    let trivial = matreg(&["fuzzy-torus", "--k", "1"]);
    assert_eq!(trivial.status.code(), Some(0));
    assert_eq!(json(&trivial)["rows"][0]["algebra_dim"], 1);
}

#[test]
fn defect_scans() {
    let torus = json(&matreg(&["defect-scan", "--family", "torus", "--k", "8..64"]));
    assert!((torus["slope"].as_f64().unwrap() - 2.0).abs() <= 0.2);
    assert_eq!(torus["verdict"], "pass");

    let sphere = matreg(&["defect-scan", "--k", "4..40"]);
    assert_eq!(sphere.status.code(), Some(0));
    let sphere = json(&sphere);
    // Weyl-ordered quadratic pairs lose the hbar^2 term entirely
    assert!((sphere["slope"].as_f64().unwrap() - 3.0).abs() < 0.05);
    assert_eq!(sphere["rows"].as_array().unwrap().len(), 37);

    let cfg = temp_file(
        "linear.json",
        r#"{"sphere": [{"nvars": 3, "terms": [{"exps": [1, 0, 0], "re": 1.0}]},
                       {"nvars": 3, "terms": [{"exps": [0, 1, 0], "re": 1.0}]}]}"#,
    );
    let exact = json(&matreg(&["defect-scan", "--k", "2..10", "--config", cfg.to_str().unwrap()]));
    assert_eq!(exact["verdict"], "exact");
}

#[test]
fn moyal_is_deterministic_and_passes() {
    let a = matreg(&["moyal", "--seed", "7"]);
    let b = matreg(&["moyal", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert!(report["associativity_max"].as_f64().unwrap() <= 1e-10);
    assert!(report["intertwiner_max"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["specs"].as_array().unwrap().len(), 10);
}

#[test]
fn matrix_model_reconverges() {
    let out = matreg(&["matrix-model", "--k", "3", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"][0];
    assert_eq!(r["converged"], true);
    assert!(r["eom_residual"].as_f64().unwrap() <= 1e-6);

    let exact = temp_file("exact.json", r#"{"perturbation": 0.0}"#);
    let out = matreg(&["matrix-model", "--k", "4", "--config", exact.to_str().unwrap()]);
    assert_eq!(json(&out)["results"][0]["classification"], "representation");

    let trace = matreg(&["matrix-model", "--k", "3", "--csv"]);
    let text = String::from_utf8(trace.stdout).unwrap();
    assert!(text.starts_with("n,iter,action,grad_norm,eom_residual"));
}

#[test]
fn pipeline_reports_kirillov_kostant_vertex() {
    let path = std::env::temp_dir().join(format!("matreg-{}-pipeline.json", std::process::id()));
    let out = matreg(&["pipeline", "--k", "2..5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let verdicts: Vec<&str> = report["stages"].as_array().unwrap().iter().map(|s| s["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["pass"; 5]);
    assert!(report["vertex"].as_str().unwrap().starts_with("Kirillov-Kostant Poisson algebra of su(2)"));
    assert_eq!(report["kernel_chain"]["rows"][0]["kernel_dim"], 12);
}

#[test]
fn corrupted_representation_fails_stage_two() {
    let mut reps: Vec<RepSet> = [2, 3].iter().map(|&k| RepSet::su2(k).unwrap()).collect();
    reps[1].generators[0][(0, 1)] += matreg_core::C64::new(1e-3, 0.0);
    let reps: Vec<RepSetJson> = reps.iter().map(RepSetJson::from).collect();
    let cfg = temp_file("corrupt.json", &serde_json::json!({ "reps": reps }).to_string());
    let out = matreg(&["pipeline", "--k", "2,3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["failed_stage"], 2);
    assert_eq!(report["passed"], false);
}

#[test]
fn unknown_config_fields_exit_2() {
    let cfg = temp_file("bogus.json", r#"{"bogus": 1}"#);
    let out = matreg(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}
