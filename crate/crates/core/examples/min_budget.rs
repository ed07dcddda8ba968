//! Minimum single-node curing budget for every node of a model.
//!
//! ```text
//! cargo run --example min_budget [path/to/model.json]
//! ```

use sis_budget::budget::{solve_min_budget, Threshold};
use sis_budget::io::load_model;
use sis_budget::{northeast, Tolerance};

fn main() {
    let model = match std::env::args().nth(1) {
        Some(path) => load_model(path).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            std::process::exit(2);
        }),
        None => northeast::model(),
    };
    let solution = solve_min_budget(&model, Tolerance::default()).unwrap();

    println!("{:>5} {:>9} {:>12} {:>12}", "node", "feasible", "threshold", "resistance");
    for a in &solution.per_node {
        let threshold = match a.threshold {
            Threshold::Finite(u) => format!("{u:.6}"),
            Threshold::Infeasible => "-".into(),
        };
        let r = a.effective_resistance.map_or("-".into(), |r| format!("{r:.6}"));
        println!("{:>5} {:>9} {threshold:>12} {r:>12}", a.node, a.feasible);
    }
    match (solution.best_node, solution.threshold) {
        (Some(node), Threshold::Finite(u)) => println!("cure node {node} at any rate above {u:.6}"),
        _ => println!("no single node can stabilize the healthy state"),
    }
}
