//! Compare the grounded-Laplacian thresholds against bisection on the
//! smallest eigenvalue of the controlled system.

use sis_budget::budget::solve_min_budget;
use sis_budget::model::validate_model;
use sis_budget::oracle::cross_check;
use sis_budget::{northeast, NetworkModel, RawModel, Tolerance};

fn show(name: &str, model: &NetworkModel) {
    let solution = solve_min_budget(model, Tolerance::default()).unwrap();
    let report = cross_check(model, &solution.per_node).unwrap();
    println!("{name}");
    for e in &report.nodes {
        let theorem = e.theorem_threshold.value().map_or("infeasible".into(), |u| format!("{u:.9}"));
        let oracle = e.oracle_threshold.value().map_or("unbounded".into(), |u| format!("{u:.9}"));
        println!(
            "  node {:>2}: theorem {theorem:>12}  oracle {oracle:>12}  {}",
            e.node,
            if e.agree { "" } else { "DISCREPANCY" }
        );
    }
}

fn main() {
    let pair = |delta: Vec<f64>| {
        validate_model(&RawModel {
            n: 2,
            beta: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            delta,
        })
        .unwrap()
    };
    show("pair, delta = (0.1, 2)", &pair(vec![0.1, 2.0]));
    show("pair, delta = (0.5, 0.5)", &pair(vec![0.5, 0.5]));
    show("northeast", &northeast::model());
}
