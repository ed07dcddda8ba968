//! Minimum single-node curing budget.
//!
//! For each node `i` the grounded Laplacian `L_i` is the augmented
//! Laplacian of `Δ - B` with the self-loop of node `i` dropped. Node `i` can
//! stabilize the healthy state iff `L_i ⪰ 0` with a simple zero, and then
//! any budget above
//!
//! ```text
//! u_i = sum_j beta_ij - delta_i - 1 / R_i,   R_i = (e_i - e_{n+1})ᵀ L_i† (e_i - e_{n+1})
//! ```
//!
//! works. The network-wide optimum is the smallest `u_i` over feasible nodes.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::linalg::{self, Tolerance};
use crate::model::{healthy_stability, NetworkModel, Node};
use crate::spectral::{self, SignedLaplacian};

/// Per-node budget threshold. Thresholds are infima: only budgets strictly
/// above the value stabilize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    Infeasible,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::Finite(u) => Some(u),
            Threshold::Infeasible => None,
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(u) => s.serialize_f64(*u),
            Threshold::Infeasible => s.serialize_str("infeasible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeAssessment {
    pub node: Node,
    pub grounded_laplacian: SignedLaplacian,
    pub feasible: bool,
    pub threshold: Threshold,
    /// Present whenever `L_i` passes the PSD-with-simple-zero test.
    pub effective_resistance: Option<f64>,
    /// `Δ - B ≻ 0` already holds; the threshold is clamped to zero.
    pub no_control_needed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSolution {
    #[serde(serialize_with = "serialize_best_node")]
    pub best_node: Option<Node>,
    pub threshold: Threshold,
    pub feasible_set: Vec<Node>,
    pub per_node: Vec<NodeAssessment>,
}

fn serialize_best_node<S: Serializer>(
    node: &Option<Node>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match node {
        Some(node) => node.serialize(s),
        None => s.serialize_str("none"),
    }
}

/// `L̂_i`, the augmented Laplacian of `Δ + U_i - B` for a concrete input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlledAugmented {
    pub node: Node,
    pub input: f64,
    pub matrix: SignedLaplacian,
    /// `δ_i + u - sum_j β_ij`
    pub d_hat_i: f64,
}

/// Self-loop weights `d_k = δ_k - sum_j β_kj`.
fn self_loop_weights(model: &NetworkModel) -> DVector<f64> {
    DVector::from_fn(model.n(), |k, _| model.delta()[k] - model.row_sum(k))
}

/// `L_i = [[Δ - V_i - B, -D_i 1], [-1ᵀ D_i, 1ᵀ D_i 1]]` with `d_i = 0`.
pub fn build_grounded_laplacian(model: &NetworkModel, node: Node) -> Result<SignedLaplacian> {
    let i = node.check(model.n())?;
    let mut d = self_loop_weights(model);
    let mut top = model.delta_minus_beta();
    // V_i removes node i's self-loop from the diagonal.
    top[(i, i)] -= d[i];
    d[i] = 0.0;
    SignedLaplacian::from_matrix(spectral::bordered(&top, &d))
}

/// Feasibility of node `i` and its budget threshold.
pub fn assess_node(model: &NetworkModel, node: Node, tol: Tolerance) -> Result<NodeAssessment> {
    let stable = healthy_stability(model, tol)?.stable;
    assess_with_stability(model, node, tol, stable)
}

fn assess_with_stability(
    model: &NetworkModel,
    node: Node,
    tol: Tolerance,
    already_stable: bool,
) -> Result<NodeAssessment> {
    let i = node.check(model.n())?;
    let grounded = build_grounded_laplacian(model, node)?;
    let n = model.n();

    let effective_resistance = if spectral::is_psd_simple_zero(&grounded, tol)? {
        let pinv = spectral::laplacian_pseudoinverse(&grounded, tol)?;
        Some(spectral::effective_resistance(&pinv, i, n))
    } else {
        None
    };

    let (feasible, threshold) = match (already_stable, effective_resistance) {
        (true, _) => (true, Threshold::Finite(0.0)),
        (false, Some(r)) => {
            let bound = model.row_sum(i) - model.delta()[i] - 1.0 / r;
            (true, Threshold::Finite(bound.max(0.0)))
        }
        (false, None) => (false, Threshold::Infeasible),
    };

    Ok(NodeAssessment {
        node,
        grounded_laplacian: grounded,
        feasible,
        threshold,
        effective_resistance,
        no_control_needed: already_stable,
    })
}

/// Assesses every node (in parallel) and picks the cheapest feasible one,
/// breaking ties by the lowest index.
pub fn solve_min_budget(model: &NetworkModel, tol: Tolerance) -> Result<ControlSolution> {
    let stable = healthy_stability(model, tol)?.stable;
    let per_node = (0..model.n())
        .into_par_iter()
        .map(|i| assess_with_stability(model, Node::from_index(i), tol, stable))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(per_node))
}

/// Picks the cheapest feasible node from already computed assessments.
pub fn aggregate(per_node: Vec<NodeAssessment>) -> ControlSolution {
    let feasible_set: Vec<Node> = per_node
        .iter()
        .filter(|a| a.feasible)
        .map(|a| a.node)
        .collect();

    let mut best: Option<(Node, f64)> = None;
    for a in per_node.iter().filter(|a| a.feasible) {
        if let Threshold::Finite(u) = a.threshold {
            if best.is_none_or(|(node, b)| u < b || (u == b && a.node < node)) {
                best = Some((a.node, u));
            }
        }
    }

    ControlSolution {
        best_node: best.map(|(node, _)| node),
        threshold: best.map_or(Threshold::Infeasible, |(_, u)| Threshold::Finite(u)),
        feasible_set,
        per_node,
    }
}

/// `L̂_i = [[Δ + U_i - B, -D̂_i 1], [-1ᵀ D̂_i, 1ᵀ D̂_i 1]]`.
pub fn build_controlled_augmented(
    model: &NetworkModel,
    node: Node,
    input: f64,
) -> Result<ControlledAugmented> {
    let i = node.check(model.n())?;
    if !input.is_finite() || input < 0.0 {
        return Err(crate::Error::InvalidParameter(format!(
            "control input must be finite and nonnegative, got {input}"
        )));
    }
    let mut d = self_loop_weights(model);
    let mut top = model.delta_minus_beta();
    top[(i, i)] += input;
    d[i] += input;
    let d_hat_i = d[i];
    Ok(ControlledAugmented {
        node,
        input,
        matrix: SignedLaplacian::from_matrix(spectral::bordered(&top, &d))?,
        d_hat_i,
    })
}

/// `L̂_i - L_i - d̂_i (e_i - e_{n+1})(e_i - e_{n+1})ᵀ`, which vanishes.
pub fn rank_one_residual(grounded: &SignedLaplacian, controlled: &ControlledAugmented) -> DMatrix<f64> {
    let size = grounded.n();
    let v = linalg::unit_difference(size, controlled.node.index(), size - 1);
    controlled.matrix.matrix() - grounded.matrix() - (&v * v.transpose()) * controlled.d_hat_i
}
