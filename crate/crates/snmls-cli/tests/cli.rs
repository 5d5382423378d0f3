//! End-to-end tests of the snmls binary: exit codes, report fields, and
//! byte-stable output.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use snmls::colligation::random_conservative;
use snmls::io::{
    to_canonical_json, ColligationJson, GraphJson, ProblemFile, SeriesJson, SideDataJson,
};
use snmls::random::{random_cmat, random_nilpotent_tuple, rng_from_seed};
use snmls::series::eval_left;
use snmls::{Graph, SideData};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snmls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).expect("utf8");
    let v = serde_json::from_str(&stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {stdout}\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (v, code)
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_graph_reports_constants_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(dir.path(), "g.json", r#"{"graph": "full:2,3"}"#);
    let (v, code) = run_json(&["check-graph", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["admissible"], Value::Bool(true));
    assert_eq!(v["max_sources"], 2);
    assert_eq!(v["max_ranges"], 3);
    assert_eq!(v["num_edges"], 6);

    let f = write_file(
        dir.path(),
        "bad.json",
        r#"{"graph": {"components": [{"sources": 0, "ranges": 1}]}}"#,
    );
    let (v, code) = run_json(&["check-graph", &f]);
    assert_eq!(code, 1);
    assert_eq!(v["admissible"], Value::Bool(false));

    let f = write_file(dir.path(), "syntax.json", "{not json");
    let out = run(&["check-graph", &f]);
    assert_eq!(out.status.code(), Some(2));

    let f = write_file(dir.path(), "unknown.json", r#"{"graf": "fm:1"}"#);
    let out = run(&["check-graph", &f]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["check-graph", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pick_mode_settles_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_file(
        dir.path(),
        "p.json",
        r#"{"points": [{"lambda": [[0,0]], "b": [[1,0]], "c": [[0.5,0]]}]}"#,
    );
    let (v, code) = run_json(&["pick", &f]);
    assert_eq!(code, 0);
    assert!((v["kernel"]["data"][0][0].as_f64().unwrap() - 0.75).abs() < 1e-14);
    assert_eq!(v["feasible"], Value::Bool(true));

    let f = write_file(
        dir.path(),
        "q.json",
        r#"{"points": [{"lambda": [[0,0]], "b": [[1,0]], "c": [[1.5,0]]}]}"#,
    );
    let (v, code) = run_json(&["pick", &f]);
    assert_eq!(code, 1);
    assert_eq!(v["feasible"], Value::Bool(false));
}

#[test]
fn nsp_mode_cross_checks_toeplitz() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = r#"{"graph": "fm:1", "dim_in": 1, "dim_out": 1,
        "targets": [{"word": [], "matrix": [[0.5,0]]},
                    {"word": [0], "matrix": [[0.9,0]]}]}"#;
    let f = write_file(dir.path(), "n1.json", infeasible);
    let (v, code) = run_json(&["nsp", &f]);
    assert_eq!(code, 1);
    assert_eq!(v["feasibility"]["verdict"], "infeasible");
    assert!(v["toeplitz_norm"].as_f64().unwrap() > 1.0);
    assert_eq!(v["verdicts_agree"], Value::Bool(true));

    let feasible = r#"{"graph": "fm:1", "dim_in": 1, "dim_out": 1,
        "targets": [{"word": [], "matrix": [[0.5,0]]},
                    {"word": [0], "matrix": [[0.5,0]]}]}"#;
    let f = write_file(dir.path(), "n2.json", feasible);
    let (v, code) = run_json(&["nsp", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["feasibility"]["verdict"], "feasible");
    assert_eq!(v["verdicts_agree"], Value::Bool(true));
}

/// Left data sampled from a conservative transfer function, serialized
/// the way a user would prepare it.
fn round_trip_problem(seed: u64) -> (ProblemFile, SeriesJson) {
    let mut rng = rng_from_seed(seed);
    let g = Graph::gr(2).unwrap();
    let col = random_conservative(&mut rng, &g, &[2, 2], 2).unwrap();
    let f = col.transfer_series(4);
    let t = random_nilpotent_tuple(&mut rng, &g, 3, 3, 0.9);
    let x = random_cmat(&mut rng, 3, col.dim_out(), 1.0);
    let y = eval_left(&t, &x, &f).unwrap().value;
    let file = ProblemFile {
        graph: Some(GraphJson::from_graph(&g)),
        dim_in: Some(col.dim_in()),
        dim_out: Some(col.dim_out()),
        left: Some(SideDataJson::from_side(&SideData { t, x, y })),
        ..Default::default()
    };
    (file, SeriesJson::from_series(&f))
}

#[test]
fn feasibility_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (problem, truth) = round_trip_problem(42);
    let f = write_file(
        dir.path(),
        "problem.json",
        &to_canonical_json(&problem).unwrap(),
    );

    let (v, code) = run_json(&["feasibility", &f]);
    assert_eq!(code, 0, "feasibility report: {v}");
    assert_eq!(v["verdict"], "feasible");
    assert!(v["kernels"].is_array());
    assert!(v["residual"].as_f64().unwrap() < 1e-8);

    let out1 = dir.path().join("report1.json");
    let out2 = dir.path().join("report2.json");
    for out in [&out1, &out2] {
        let status = run(&["solve", &f, "--out", out.to_str().unwrap()]).status;
        assert_eq!(status.code(), Some(0));
    }
    let r1 = std::fs::read(&out1).unwrap();
    let r2 = std::fs::read(&out2).unwrap();
    assert_eq!(r1, r2, "solve output must be byte stable");
    let v: Value = serde_json::from_slice(&r1).unwrap();
    let sols = v["solutions"].as_array().unwrap();
    assert!(sols.len() >= 3);
    for s in sols {
        assert!(s["interpolation_residual"].as_f64().unwrap() < 1e-8);
        assert!(s["schur_max_norm"].as_f64().unwrap() <= 1.0 + 1e-8);
    }

    // verify the true series, then a visibly wrong one
    let mut with_truth = problem.clone();
    with_truth.solution = Some(truth.clone());
    let fv = write_file(
        dir.path(),
        "verify.json",
        &to_canonical_json(&with_truth).unwrap(),
    );
    let (v, code) = run_json(&["verify", &fv]);
    assert_eq!(code, 0, "verify report: {v}");
    assert_eq!(v["pass"], Value::Bool(true));

    let mut wrong = truth.clone();
    wrong.terms[0].matrix[0][0] += 1.0;
    let mut with_wrong = problem.clone();
    with_wrong.solution = Some(wrong);
    let fw = write_file(
        dir.path(),
        "wrong.json",
        &to_canonical_json(&with_wrong).unwrap(),
    );
    let (v, code) = run_json(&["verify", &fw]);
    assert_eq!(code, 1);
    assert_eq!(v["interpolation_pass"], Value::Bool(false));
}

#[test]
fn simulate_mode_passes_for_conservative_colligation() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(9);
    let g = Graph::new(vec![(2, 1), (1, 2)]).unwrap();
    let col = random_conservative(&mut rng, &g, &[2, 1], 2).unwrap();
    let problem = ProblemFile {
        colligation: Some(ColligationJson::from_colligation(&col)),
        horizon: Some(3),
        inputs: Some(vec![snmls::io::InputJson {
            word: vec![],
            vector: vec![[1.0, 0.0]; col.dim_in()],
        }]),
        ..Default::default()
    };
    let f = write_file(dir.path(), "sim.json", &to_canonical_json(&problem).unwrap());
    let (v, code) = run_json(&["simulate", &f]);
    assert_eq!(code, 0, "simulate report: {v}");
    assert!(v["worst_slack"].as_f64().unwrap() >= -1e-8);
    assert!(v["conservativity_defect"].as_f64().unwrap() < 1e-12);
    assert!(!v["records"].as_array().unwrap().is_empty());
}
