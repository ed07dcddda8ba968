//! The networked SIS model: validation, connectivity, stability of the
//! healthy state and the epidemic equilibrium.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};

/// Relative asymmetry accepted (and averaged away) by [`validate_model`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default residual tolerance of [`epidemic_equilibrium`].
pub const DEFAULT_EQUILIBRIUM_TOL: f64 = 1e-10;

/// Iteration cap of the monotone fixed-point scheme.
pub const EQUILIBRIUM_MAX_ITER: usize = 1_000_000;

/// A node of the network.
///
/// Stored 0-based; every external surface (JSON, CSV, CLI) uses the
/// 1-based form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node(usize);

impl Node {
    pub fn from_index(index: usize) -> Self {
        Node(index)
    }

    pub fn from_one_based(label: usize) -> Result<Self> {
        label
            .checked_sub(1)
            .map(Node)
            .ok_or(Error::NodeOutOfRange { node: label, n: 0 })
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn one_based(self) -> usize {
        self.0 + 1
    }

    pub(crate) fn check(self, n: usize) -> Result<usize> {
        if self.0 < n {
            Ok(self.0)
        } else {
            Err(Error::NodeOutOfRange {
                node: self.one_based(),
                n,
            })
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.one_based(), f)
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.one_based() as u64)
    }
}

/// Unvalidated model data, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawModel {
    pub n: usize,
    pub beta: Vec<Vec<f64>>,
    pub delta: Vec<f64>,
}

/// A validated SIS network: symmetric nonnegative infection rates over a
/// connected graph and nonnegative curing rates. Self-loops `beta[i][i]`
/// are allowed and count toward row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    beta: DMatrix<f64>,
    delta: DVector<f64>,
}

impl NetworkModel {
    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    pub fn delta(&self) -> &DVector<f64> {
        &self.delta
    }

    /// `sum_j beta_ij`.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.beta.row(i).sum()
    }

    /// `Δ - B`.
    pub fn delta_minus_beta(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.delta) - &self.beta
    }

    /// Returns the same network with `beta` and `delta` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<NetworkModel> {
        validate_model(&RawModel {
            n: self.n(),
            beta: linalg::to_rows(&(&self.beta * c)),
            delta: (&self.delta * c).iter().copied().collect(),
        })
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            n: self.n(),
            beta: linalg::to_rows(&self.beta),
            delta: self.delta.iter().copied().collect(),
        }
    }
}

impl Serialize for NetworkModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

fn check_entry(what: &'static str, location: impl Fn() -> String, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what,
            location: location(),
        });
    }
    if value < 0.0 {
        return Err(Error::NegativeEntry {
            what,
            location: location(),
            value,
        });
    }
    Ok(())
}

/// Validates raw model data.
///
/// Asymmetry up to [`SYMMETRY_TOL`] (relative to the largest entry) is
/// accepted and averaged away so the stored matrix is exactly symmetric.
pub fn validate_model(raw: &RawModel) -> Result<NetworkModel> {
    let n = raw.n;
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    if raw.delta.len() != n {
        return Err(Error::Dimension(format!(
            "delta has {} entries, expected {n}",
            raw.delta.len()
        )));
    }
    if raw.beta.len() != n {
        return Err(Error::Dimension(format!(
            "beta has {} rows, expected {n}",
            raw.beta.len()
        )));
    }
    if let Some((i, row)) = raw.beta.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Dimension(format!(
            "beta row {} has {} entries, expected {n}",
            i + 1,
            row.len()
        )));
    }

    for (i, row) in raw.beta.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            check_entry("beta", || format!("({}, {})", i + 1, j + 1), v)?;
        }
    }
    for (i, &v) in raw.delta.iter().enumerate() {
        check_entry("delta", || format!("{}", i + 1), v)?;
    }

    let beta = DMatrix::from_fn(n, n, |i, j| raw.beta[i][j]);
    let scale = linalg::max_abs(&beta).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (beta[(i, j)], beta[(j, i)]);
            if (a - b).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Asymmetric {
                    i: i + 1,
                    j: j + 1,
                    a,
                    b,
                });
            }
        }
    }
    let beta = linalg::symmetrize(&beta);

    let components = count_components(&beta);
    if components != 1 {
        return Err(Error::Disconnected { components });
    }

    Ok(NetworkModel {
        beta,
        delta: DVector::from_column_slice(&raw.delta),
    })
}

/// Number of connected components of the off-diagonal pattern.
fn count_components(beta: &DMatrix<f64>) -> usize {
    let n = beta.nrows();
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v != u && !seen[v] && beta[(u, v)] != 0.0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    components
}

/// True iff the off-diagonal pattern of `beta` forms a single component.
/// Self-loops never create connectivity.
pub fn is_connected(model: &NetworkModel) -> bool {
    count_components(&model.beta) == 1
}

/// Smallest eigenvalue of `Δ - B` and the resulting stability verdict of
/// the healthy state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub lambda_min: f64,
    pub stable: bool,
}

pub fn healthy_stability(model: &NetworkModel, tol: Tolerance) -> Result<StabilityReport> {
    let m = model.delta_minus_beta();
    let lambda_min = linalg::smallest_eigenvalue(&m)?;
    let tau = tol.resolve(&m);
    Ok(StabilityReport {
        lambda_min,
        stable: lambda_min > tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub x_star: Vec<f64>,
    pub residual_inf_norm: f64,
}

/// `‖-Δx + (I - X)Bx‖∞`.
pub fn equilibrium_residual(model: &NetworkModel, x: &DVector<f64>) -> f64 {
    let bx = &model.beta * x;
    (0..model.n())
        .map(|i| (-model.delta[i] * x[i] + (1.0 - x[i]) * bx[i]).abs())
        .fold(0.0, f64::max)
}

/// The epidemic equilibrium, or the healthy state when `Δ - B ≻ 0`.
///
/// Iterates `x_i <- (Bx)_i / (δ_i + (Bx)_i)` from the all-ones vector; the
/// map is monotone on `[0,1]^n` so the iterates decrease to the largest
/// fixed point.
pub fn epidemic_equilibrium(
    model: &NetworkModel,
    tol: f64,
    stability_tol: Tolerance,
) -> Result<EquilibriumResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "equilibrium tolerance must be positive, got {tol}"
        )));
    }
    let n = model.n();
    if healthy_stability(model, stability_tol)?.stable {
        return Ok(EquilibriumResult {
            x_star: vec![0.0; n],
            residual_inf_norm: 0.0,
        });
    }

    let mut x = DVector::from_element(n, 1.0);
    let mut residual = equilibrium_residual(model, &x);
    for _ in 0..EQUILIBRIUM_MAX_ITER {
        if residual < tol {
            return Ok(EquilibriumResult {
                x_star: x.iter().copied().collect(),
                residual_inf_norm: residual,
            });
        }
        let bx = &model.beta * &x;
        for i in 0..n {
            let denom = model.delta[i] + bx[i];
            x[i] = if denom > 0.0 { bx[i] / denom } else { 0.0 };
        }
        residual = equilibrium_residual(model, &x);
    }
    Err(Error::IterationCap {
        iterations: EQUILIBRIUM_MAX_ITER,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(beta: Vec<Vec<f64>>, delta: Vec<f64>) -> RawModel {
        RawModel {
            n: delta.len(),
            beta,
            delta,
        }
    }

    fn pair(delta: [f64; 2]) -> NetworkModel {
        validate_model(&raw(vec![vec![0.0, 1.0], vec![1.0, 0.0]], delta.to_vec())).unwrap()
    }

    #[test]
    fn minimal_pair_is_valid() {
        let m = pair([0.5, 0.5]);
        assert_eq!(m.n(), 2);
        assert!(is_connected(&m));
    }

    #[test]
    fn rejects_asymmetric() {
        let err = validate_model(&raw(vec![vec![0.0, 1.0], vec![0.9, 0.0]], vec![0.5, 0.5]));
        assert!(matches!(err, Err(Error::Asymmetric { i: 1, j: 2, .. })));
    }

    #[test]
    fn tiny_asymmetry_is_averaged() {
        let m = validate_model(&raw(
            vec![vec![0.0, 1.0], vec![1.0 + 1e-14, 0.0]],
            vec![0.5, 0.5],
        ))
        .unwrap();
        assert_eq!(m.beta()[(0, 1)], m.beta()[(1, 0)]);
    }

    #[test]
    fn rejects_bad_dimensions_and_entries() {
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, 1.0]], vec![0.5, 0.5])),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, 1.0], vec![1.0]], vec![0.5, 0.5])),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5])),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, -1.0], vec![-1.0, 0.0]], vec![0.5, 0.5])),
            Err(Error::NegativeEntry { what: "beta", .. })
        ));
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, -0.1])),
            Err(Error::NegativeEntry { what: "delta", .. })
        ));
        assert!(matches!(
            validate_model(&raw(vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]], vec![0.5, 0.5])),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            validate_model(&RawModel { n: 0, beta: vec![], delta: vec![] }),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn isolated_node_is_disconnected() {
        let err = validate_model(&raw(
            vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
            vec![1.0; 3],
        ));
        assert_eq!(err, Err(Error::Disconnected { components: 2 }));
        assert_eq!(
            count_components(&DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 0.])),
            2
        );
    }

    #[test]
    fn self_loops_do_not_connect() {
        let err = validate_model(&raw(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]));
        assert_eq!(err, Err(Error::Disconnected { components: 2 }));
    }

    #[test]
    fn validation_is_idempotent() {
        let m = pair([0.1, 2.0]);
        assert_eq!(validate_model(&m.to_raw()).unwrap(), m);
    }

    #[test]
    fn single_node_stability() {
        let m = validate_model(&raw(vec![vec![0.0]], vec![1.0])).unwrap();
        let r = healthy_stability(&m, Tolerance::default()).unwrap();
        assert!((r.lambda_min - 1.0).abs() < 1e-14);
        assert!(r.stable);
    }

    #[test]
    fn pair_with_weak_curing_is_unstable() {
        // det(Δ - B) = 0.1 * 2 - 1 < 0, so one eigenvalue is negative.
        let r = healthy_stability(&pair([0.1, 2.0]), Tolerance::default()).unwrap();
        let expected = (2.1 - (1.9f64.powi(2) + 4.0).sqrt()) / 2.0;
        assert!((r.lambda_min - expected).abs() < 1e-12);
        assert!(!r.stable);
    }

    #[test]
    fn stable_model_has_zero_equilibrium() {
        let m = pair([2.0, 2.0]);
        let eq = epidemic_equilibrium(&m, 1e-10, Tolerance::default()).unwrap();
        assert_eq!(eq.x_star, vec![0.0, 0.0]);
    }

    #[test]
    fn symmetric_pair_equilibrium_is_one_half() {
        // -0.5 x + (1 - x) x = 0  =>  x = 0.5
        let eq = epidemic_equilibrium(&pair([0.5, 0.5]), 1e-12, Tolerance::default()).unwrap();
        for v in &eq.x_star {
            assert!((v - 0.5).abs() < 1e-10);
        }
        assert!(eq.residual_inf_norm < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_equilibrium_tolerance() {
        assert!(epidemic_equilibrium(&pair([0.5, 0.5]), 0.0, Tolerance::default()).is_err());
    }

    #[test]
    fn node_labels_round_trip() {
        let node = Node::from_one_based(5).unwrap();
        assert_eq!(node.index(), 4);
        assert_eq!(node.to_string(), "5");
        assert!(Node::from_one_based(0).is_err());
        assert!(node.check(4).is_err());
        assert_eq!(node.check(9).unwrap(), 4);
    }
}
