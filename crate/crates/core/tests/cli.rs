use std::path::PathBuf;

use serde_json::Value;
use sis_budget::cli::run_args;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = run_args(std::iter::once("sis-budget").chain(args.iter().copied()));
    let json = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, json, out.stderr)
}

fn keys(v: &Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

#[test]
fn validate_reports_shape() {
    let (code, json, _) = run(&["validate", &data("northeast.json")]);
    assert_eq!(code, 0);
    assert_eq!(json["n"], 9);
    assert_eq!(json["edges"], 11);
    assert_eq!(json["self_loops"], 9);
}

#[test]
fn validate_rejects_bad_models() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("asym.json", r#"{"n":2,"delta":[0.5,0.5],"beta":[[0,1],[0.9,0]]}"#),
        ("split.json", r#"{"n":3,"delta":[1,1,1],"beta":[[0,1,0],[1,0,0],[0,0,0]]}"#),
        ("broken.json", r#"{"n":2,"delta":"#),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let (code, _, stderr) = run(&["validate", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{name}");
        assert!(stderr.starts_with("error:"), "{stderr}");
    }
    assert_eq!(run(&["validate", "/nonexistent/model.json"]).0, 2);
}

#[test]
fn stability_command() {
    let (code, json, stderr) = run(&["stability", &data("northeast.json")]);
    assert_eq!(code, 1);
    assert_eq!(keys(&json), ["lambda_min", "stable"]);
    assert!((json["lambda_min"].as_f64().unwrap() + 0.3134).abs() < 5e-4);
    assert_eq!(json["stable"], false);
    assert!(stderr.contains("unstable"));
}

#[test]
fn equilibrium_command() {
    let (code, json, _) = run(&["equilibrium", &data("northeast.json")]);
    assert_eq!(code, 0);
    let x = json["x_star"].as_array().unwrap();
    assert_eq!(x.len(), 9);
    assert!((x[4].as_f64().unwrap() - 0.1037).abs() < 1e-4);
    assert!(json["residual_inf_norm"].as_f64().unwrap() < 1e-10);
}

#[test]
fn min_budget_command() {
    let (code, json, stderr) = run(&["min-budget", &data("northeast.json")]);
    assert_eq!(code, 0);
    assert_eq!(keys(&json), ["best_node", "feasible_set", "per_node", "threshold"]);
    assert_eq!(json["feasible_set"], serde_json::json!([5]));
    assert_eq!(json["best_node"], 5);
    assert!((json["threshold"].as_f64().unwrap() - 1.30).abs() < 5e-3);
    let node5 = &json["per_node"][4];
    assert_eq!(
        keys(node5),
        [
            "effective_resistance",
            "feasible",
            "grounded_laplacian",
            "no_control_needed",
            "node",
            "threshold"
        ]
    );
    assert_eq!(node5["grounded_laplacian"]["matrix"].as_array().unwrap().len(), 10);
    assert_eq!(json["per_node"][0]["threshold"], "infeasible");
    assert!(stderr.contains("infimum"));
}

#[test]
fn min_budget_single_node_and_extras() {
    let (code, json, _) = run(&[
        "min-budget",
        &data("northeast.json"),
        "--node",
        "5",
        "--cross-check",
        "--dump-matrices",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["node"], 5);
    assert_eq!(json["cross_check"]["discrepancies"], serde_json::json!([]));
    let pinv = &json["matrices"]["grounded_pseudoinverses"][0];
    assert_eq!(pinv["node"], 5);
    assert_eq!(pinv["matrix"].as_array().unwrap().len(), 10);

    let (code, json, _) = run(&["min-budget", &data("northeast.json"), "--node", "1"]);
    assert_eq!(code, 1);
    assert_eq!(json["feasible"], false);
    assert_eq!(run(&["min-budget", &data("northeast.json"), "--node", "10"]).0, 2);
}

#[test]
fn cross_check_on_northeast() {
    let (code, json, stderr) = run(&["min-budget", &data("northeast.json"), "--cross-check"]);
    // the oracle stabilizes nodes 6, 8 and 9 that the grounded test rejects
    assert_eq!(code, 1);
    let report = &json["cross_check"];
    assert_eq!(report["discrepancies"], serde_json::json!([6, 8, 9]));
    let entry = &report["nodes"][4];
    assert_eq!(entry["agree"], true);
    assert!(entry["difference"].as_f64().unwrap() < 1e-6);
    for k in [0usize, 1, 2, 3, 6] {
        assert_eq!(report["nodes"][k]["oracle_threshold"], "unbounded");
        assert_eq!(report["nodes"][k]["agree"], true);
    }
    for k in [5usize, 7, 8] {
        assert_eq!(report["nodes"][k]["theorem_threshold"], "infeasible");
        assert!(report["nodes"][k]["oracle_threshold"].as_f64().unwrap() > 1.3);
    }
    assert!(stderr.contains("DISCREPANCY at node 6"));
}

#[test]
fn weak_pair_is_infeasible_and_flagged() {
    let (code, json, stderr) = run(&["min-budget", &data("weak_pair.json"), "--cross-check"]);
    assert_eq!(code, 1);
    assert_eq!(json["best_node"], "none");
    assert_eq!(json["feasible_set"], serde_json::json!([]));
    assert_eq!(json["cross_check"]["discrepancies"], serde_json::json!([1, 2]));
    assert!((json["cross_check"]["nodes"][0]["oracle_threshold"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!(stderr.contains("DISCREPANCY at node 1"));
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let (code, json, _) = run(&[
        "simulate",
        &data("northeast.json"),
        "--control",
        "5:1.31",
        "--x0",
        "uniform:0.1",
        "--dt",
        "0.05",
        "--t-end",
        "6000",
        "--every",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(json["final_max"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3,x4,x5,x6,x7,x8,x9");
    assert_eq!(lines.len(), 1 + 61);
    assert!(lines[1].starts_with("0,0.1,"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 6000.0);
    assert!(last[1..].iter().all(|&v| v < 1e-6));
}

#[test]
fn simulate_to_stdout_and_bad_flags() {
    let out = run_args([
        "sis-budget",
        "simulate",
        &data("weak_pair.json"),
        "--x0",
        "0.9,0.1",
        "--t-end",
        "1",
        "--every",
        "50",
    ]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 4);
    assert!(out.stdout.starts_with("t,x1,x2\n0,0.9,0.1\n0.5,"));

    for bad in [
        vec!["--x0", "0.9"],
        vec!["--control", "3:1"],
        vec!["--control", "1:-2"],
        vec!["--dt", "0"],
        vec!["--dt", "5", "--x0", "uniform:1"],
    ] {
        let path = data("weak_pair.json");
        let mut full = vec!["sis-budget", "simulate", path.as_str()];
        full.extend(bad.iter().copied());
        assert_eq!(run_args(full).code, 2, "{bad:?}");
    }
}

#[test]
fn case_study_is_deterministic() {
    let a = run_args(["sis-budget", "case-study", "--cross-check"]);
    let b = run_args(["sis-budget", "case-study", "--cross-check"]);
    assert_eq!(a, b);
    let json: Value = serde_json::from_str(&a.stdout).unwrap();
    let checks = json["checks"].as_array().unwrap();
    let row = |q: &str| checks.iter().find(|c| c["quantity"] == q).unwrap().clone();
    assert_eq!(row("lambda_min(Delta - B)")["pass"], true);
    assert_eq!(row("feasible set")["pass"], true);
    assert_eq!(row("u_5")["pass"], true);
    assert_eq!(row("theorem vs oracle u_5")["pass"], true);
    assert_eq!(row("controlled run decays from x*")["pass"], true);
    assert_eq!(json["solution"]["best_node"], 5);
    assert!(a.stderr.contains("quantity"));
}

#[test]
fn case_study_takes_no_model() {
    assert_eq!(run(&["case-study", &data("northeast.json")]).0, 2);
}
