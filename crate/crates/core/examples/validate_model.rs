//! Parse a model from JSON, validate it and print what was accepted.
//!
//! ```text
//! cargo run --example validate_model [path/to/model.json]
//! ```

use sis_budget::io::{load_model, parse_model};
use sis_budget::model::is_connected;

const TRIANGLE: &str = r#"{
    "n": 3,
    "delta": [0.4, 0.4, 0.4],
    "edges": [{"i": 1, "j": 2, "w": 0.8}, {"i": 2, "j": 3, "w": 0.5}],
    "beta_diag": [0.2, 0.0, 0.0]
}"#;

fn main() {
    let model = match std::env::args().nth(1) {
        Some(path) => load_model(path),
        None => parse_model(TRIANGLE),
    }
    .unwrap_or_else(|e| {
        eprintln!("error: {e}");
        std::process::exit(2);
    });

    println!("n = {}, connected = {}", model.n(), is_connected(&model));
    println!("beta = {:.3}", model.beta());
    println!("delta = {:.3}", model.delta().transpose());

    // a few ways a model can be rejected
    for bad in [
        r#"{"n": 2, "delta": [0.5, 0.5], "beta": [[0, 1], [0.9, 0]]}"#,
        r#"{"n": 3, "delta": [1, 1, 1], "beta": [[0, 1, 0], [1, 0, 0], [0, 0, 0]]}"#,
        r#"{"n": 2, "delta": [-1, 1], "edges": [{"i": 1, "j": 2, "w": 1}]}"#,
    ] {
        println!("rejected: {}", parse_model(bad).unwrap_err());
    }
}
