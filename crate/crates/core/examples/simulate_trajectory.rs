//! Integrate the controlled epidemic from its endemic equilibrium and
//! write the trajectory as CSV.
//!
//! ```text
//! cargo run --release --example simulate_trajectory > traj.csv
//! ```

use sis_budget::budget::solve_min_budget;
use sis_budget::model::{epidemic_equilibrium, DEFAULT_EQUILIBRIUM_TOL};
use sis_budget::simulate::{simulate, Control, SimParams};
use sis_budget::{northeast, Tolerance};

fn main() {
    let model = northeast::model();
    let eq = epidemic_equilibrium(&model, DEFAULT_EQUILIBRIUM_TOL, Tolerance::default()).unwrap();
    let solution = solve_min_budget(&model, Tolerance::default()).unwrap();
    let node = solution.best_node.expect("a feasible node");
    let u = solution.threshold.value().unwrap();

    for input in [u - 0.05, u + 0.05] {
        let control = Control { node, input };
        let params = SimParams {
            dt: 0.05,
            t_end: 2000.0,
            every: 200,
        };
        let traj = simulate(&model, &eq.x_star, Some(control), params).unwrap();
        let peak = traj.final_state().iter().copied().fold(0.0, f64::max);
        eprintln!("u{node} = {input:.4}: max infection at t = {} is {peak:.3e}", traj.final_time());
        if input > u {
            traj.write_csv(std::io::stdout().lock()).unwrap();
        }
    }
}
