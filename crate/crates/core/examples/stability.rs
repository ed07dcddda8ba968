//! Stability of the healthy state and the endemic equilibrium.

use sis_budget::model::{epidemic_equilibrium, healthy_stability, DEFAULT_EQUILIBRIUM_TOL};
use sis_budget::{northeast, RawModel, Tolerance};

fn report(name: &str, model: &sis_budget::NetworkModel) {
    let s = healthy_stability(model, Tolerance::default()).unwrap();
    let eq = epidemic_equilibrium(model, DEFAULT_EQUILIBRIUM_TOL, Tolerance::default()).unwrap();
    println!("{name}");
    println!("  lambda_min(Delta - B) = {:+.6} -> {}", s.lambda_min, if s.stable { "stable" } else { "unstable" });
    println!("  x* = {:.6?}", eq.x_star);
    println!("  residual = {:.1e}", eq.residual_inf_norm);
}

fn main() {
    let pair = |d1: f64, d2: f64| {
        sis_budget::model::validate_model(&RawModel {
            n: 2,
            beta: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            delta: vec![d1, d2],
        })
        .unwrap()
    };
    report("pair, delta = (2, 2)", &pair(2.0, 2.0));
    report("pair, delta = (0.5, 0.5)", &pair(0.5, 0.5));
    report("pair, delta = (0.1, 2)", &pair(0.1, 2.0));
    report("northeast", &northeast::model());
}
