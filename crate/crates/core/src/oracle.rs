//! Brute-force cross-checks for the analytic results.
//!
//! Everything here goes through a cyclic Jacobi eigensolver written
//! independently of the nalgebra routines used by [`crate::spectral`], so
//! agreement between the two paths means something.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::budget::{NodeAssessment, Threshold};
use crate::error::{Error, Result};
use crate::model::{NetworkModel, Node};

/// Eigenvalues below this fraction of the spectral radius are treated as
/// zero by [`oracle_pseudoinverse`].
pub const RANK_CUTOFF: f64 = 1e-10;

/// Times the bisection cap is doubled before a node is declared unbounded.
pub const MAX_CAP_DOUBLINGS: u32 = 4;

/// Bisection width used by [`cross_check`].
pub const CROSS_CHECK_BISECTION_TOL: f64 = 1e-10;

/// Largest theorem/oracle threshold gap reported as agreement.
pub const CROSS_CHECK_AGREEMENT_TOL: f64 = 1e-6;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::Dimension("eigendecomposition needs a square matrix".into()));
    }
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off.sqrt() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

pub fn oracle_lambda_min(m: &DMatrix<f64>) -> Result<f64> {
    jacobi_eigen(m).map(|(values, _)| values[0])
}

/// True iff `|λ₁| <= tol` and `λ₂ > tol`.
pub fn oracle_psd_simple_zero(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let (values, _) = jacobi_eigen(m)?;
    Ok(values.len() >= 2 && values[0].abs() <= tol && values[1] > tol)
}

/// Pseudoinverse from the eigendecomposition, dropping eigenvalues below
/// [`RANK_CUTOFF`] times the largest magnitude.
pub fn oracle_pseudoinverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = jacobi_eigen(m)?;
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = RANK_CUTOFF * largest.max(1.0);
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda.abs() > cutoff {
            let col = vectors.column(k);
            out += (col * col.transpose()) / lambda;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleValue {
    Finite(f64),
    Unbounded,
}

impl OracleValue {
    pub fn value(self) -> Option<f64> {
        match self {
            OracleValue::Finite(u) => Some(u),
            OracleValue::Unbounded => None,
        }
    }
}

impl Serialize for OracleValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OracleValue::Finite(u) => s.serialize_f64(*u),
            OracleValue::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleThreshold {
    pub node: Node,
    pub threshold: OracleValue,
    pub iterations: u32,
    pub bracket_width: f64,
}

/// `λ₁(Δ + U_i - B)` for input `u` at node `i`.
pub fn controlled_lambda_min(model: &NetworkModel, i: usize, u: f64) -> Result<f64> {
    let mut m = model.delta_minus_beta();
    m[(i, i)] += u;
    oracle_lambda_min(&m)
}

/// Default bisection cap: `10 · (max row sum of beta + max delta)`.
pub fn default_u_max(model: &NetworkModel) -> f64 {
    let max_row = (0..model.n()).map(|i| model.row_sum(i)).fold(0.0, f64::max);
    let max_delta = model.delta().iter().copied().fold(0.0, f64::max);
    (10.0 * (max_row + max_delta)).max(1.0)
}

/// Locates the smallest `u >= 0` with `λ₁(Δ + U_i - B) > 0` by bisection.
///
/// `λ₁` is nondecreasing in `u`, so the sign change is unique. The cap
/// `u_max` is doubled up to [`MAX_CAP_DOUBLINGS`] times before the node is
/// reported as unbounded.
pub fn oracle_threshold(
    model: &NetworkModel,
    node: Node,
    tol: f64,
    u_max: f64,
) -> Result<OracleThreshold> {
    let i = node.check(model.n())?;
    if tol.is_nan() || tol <= 0.0 || u_max.is_nan() || u_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bisection needs tol > 0 and u_max > 0, got tol={tol}, u_max={u_max}"
        )));
    }

    if controlled_lambda_min(model, i, 0.0)? > 0.0 {
        return Ok(OracleThreshold {
            node,
            threshold: OracleValue::Finite(0.0),
            iterations: 0,
            bracket_width: 0.0,
        });
    }

    let mut hi = u_max;
    let mut doublings = 0;
    while controlled_lambda_min(model, i, hi)? <= 0.0 {
        if doublings == MAX_CAP_DOUBLINGS {
            return Ok(OracleThreshold {
                node,
                threshold: OracleValue::Unbounded,
                iterations: 0,
                bracket_width: f64::INFINITY,
            });
        }
        hi *= 2.0;
        doublings += 1;
    }

    let mut lo = 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if controlled_lambda_min(model, i, mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(OracleThreshold {
        node,
        threshold: OracleValue::Finite(0.5 * (lo + hi)),
        iterations,
        bracket_width: hi - lo,
    })
}

/// Theorem verdict and oracle verdict for one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheckEntry {
    pub node: Node,
    pub theorem_feasible: bool,
    pub theorem_threshold: Threshold,
    pub oracle_threshold: OracleValue,
    pub oracle_iterations: u32,
    pub difference: Option<f64>,
    pub agree: bool,
}

/// Per-node comparison of the analytic thresholds with bisection. Any
/// disagreement is listed in `discrepancies`, never dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub agreement_tol: f64,
    pub nodes: Vec<CrossCheckEntry>,
    pub discrepancies: Vec<Node>,
}

impl CrossCheckReport {
    pub fn all_agree(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

pub fn cross_check(model: &NetworkModel, assessments: &[NodeAssessment]) -> Result<CrossCheckReport> {
    let u_max = default_u_max(model);
    let nodes = assessments
        .par_iter()
        .map(|a| {
            let oracle = oracle_threshold(model, a.node, CROSS_CHECK_BISECTION_TOL, u_max)?;
            let (difference, agree) = match (a.threshold, oracle.threshold) {
                (Threshold::Finite(t), OracleValue::Finite(o)) => {
                    let diff = (t - o).abs();
                    (Some(diff), diff <= CROSS_CHECK_AGREEMENT_TOL)
                }
                (Threshold::Infeasible, OracleValue::Unbounded) => (None, true),
                _ => (None, false),
            };
            Ok(CrossCheckEntry {
                node: a.node,
                theorem_feasible: a.feasible,
                theorem_threshold: a.threshold,
                oracle_threshold: oracle.threshold,
                oracle_iterations: oracle.iterations,
                difference,
                agree,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let discrepancies = nodes.iter().filter(|e| !e.agree).map(|e| e.node).collect();
    Ok(CrossCheckReport {
        agreement_tol: CROSS_CHECK_AGREEMENT_TOL,
        nodes,
        discrepancies,
    })
}
