use thiserror::Error;

/// Errors produced by model validation, the spectral routines, the budget
/// solver and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("infection matrix is not symmetric: beta[{i}][{j}] = {a} but beta[{j}][{i}] = {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("negative entry in {what} at {location}: {value}")]
    NegativeEntry {
        what: &'static str,
        location: String,
        value: f64,
    },

    #[error("non-finite entry in {what} at {location}")]
    NonFinite { what: &'static str, location: String },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("node {node} out of range for a network of {n} nodes (indices are 1-based)")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0} is not allowed in a loopless weighted graph")]
    SelfLoop(usize),

    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),

    #[error("loopy Laplacian has no nonzero self-loop")]
    NotStrictlyLoopy,

    #[error("matrix is not positive semidefinite with a simple zero eigenvalue (projected lambda_min = {lambda_min:e}, tol = {tol:e})")]
    NotPsdSimpleZero { lambda_min: f64, tol: f64 },

    #[error("symmetric eigensolver did not converge")]
    EigenFailure,

    #[error("fixed-point iteration hit the cap of {iterations} iterations (residual {residual:e})")]
    IterationCap { iterations: usize, residual: f64 },

    #[error("state entry {index} = {value} lies outside [0, 1]")]
    StateOutOfRange { index: usize, value: f64 },

    #[error("integration overshoot at t = {time}: x{index} = {value} (reduce dt)")]
    Overshoot { time: f64, index: usize, value: f64 },

    #[error("no steady state reached before t = {time_cap} (|dx/dt| = {rate:e})")]
    SteadyStateTimeout { time_cap: f64, rate: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
