//! Exact minimum curing budget for stabilizing the healthy state of a
//! networked SIS epidemic with a single controlled node.
//!
//! The pieces, bottom up:
//!
//! - [`model`]: validated networks, stability of the healthy state, and the
//!   epidemic equilibrium.
//! - [`spectral`]: signed/loopy/augmented Laplacians, the projected
//!   semidefiniteness test and the projection pseudoinverse.
//! - [`budget`]: grounded Laplacians, per-node thresholds and the optimal
//!   single control input.
//! - [`oracle`]: brute-force bisection and Jacobi-based checks of all of the
//!   above.
//! - [`simulate`]: RK4 integration of the dynamics.
//! - [`io`], [`cli`], [`northeast`]: model files, the command-line front
//!   end and the bundled nine-city case study.
//!
//! ```
//! use sis_budget::{budget, northeast, Tolerance};
//!
//! let model = northeast::model();
//! let solution = budget::solve_min_budget(&model, Tolerance::default()).unwrap();
//! assert_eq!(solution.best_node.unwrap().one_based(), 5);
//! assert!((solution.threshold.value().unwrap() - 1.30).abs() < 5e-3);
//! ```

pub mod budget;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod northeast;
pub mod oracle;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::Tolerance;
pub use model::{NetworkModel, Node, RawModel};
