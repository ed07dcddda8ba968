//! The nine-city northeast US passenger-rail network.
//!
//! Infection rates follow the rail connections, with unit self-infection
//! on every city; all cities share the curing rate 3.5. Node 5 is New York
//! City.

use crate::model::{validate_model, NetworkModel, RawModel};

pub const N: usize = 9;

pub const CURING_RATE: f64 = 3.5;

#[rustfmt::skip]
pub const BETA: [[f64; N]; N] = [
    [1., 1., 1., 0., 1., 0., 0., 0., 0.],
    [1., 1., 0., 1., 0., 0., 0., 0., 0.],
    [1., 0., 1., 1., 0., 0., 0., 0., 0.],
    [0., 1., 1., 1., 0., 0., 0., 0., 0.],
    [1., 0., 0., 0., 1., 1., 0., 1., 1.],
    [0., 0., 0., 0., 1., 1., 1., 1., 0.],
    [0., 0., 0., 0., 0., 1., 1., 0., 0.],
    [0., 0., 0., 0., 1., 1., 0., 1., 1.],
    [0., 0., 0., 0., 1., 0., 0., 1., 1.],
];

/// Published reference values for this network.
pub mod published {
    /// Smallest eigenvalue of `Δ - B`.
    pub const LAMBDA_MIN: f64 = -0.3134;

    /// Epidemic equilibrium, rounded to three decimals.
    pub const X_STAR: [f64; super::N] = [0.063, 0.034, 0.034, 0.026, 0.104, 0.080, 0.031, 0.090, 0.070];

    /// The only node whose grounded Laplacian passes (1-based).
    pub const FEASIBLE_NODE: usize = 5;

    /// Minimum budget at that node.
    pub const THRESHOLD: f64 = 1.30;
}

pub fn raw() -> RawModel {
    RawModel {
        n: N,
        beta: BETA.iter().map(|r| r.to_vec()).collect(),
        delta: vec![CURING_RATE; N],
    }
}

pub fn model() -> NetworkModel {
    validate_model(&raw()).expect("embedded northeast model is valid")
}
