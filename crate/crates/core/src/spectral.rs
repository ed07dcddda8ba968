//! Signed, loopy and augmented Laplacians, the projected test for
//! "positive semidefinite with a simple zero eigenvalue", and the
//! projection formula for the Moore-Penrose pseudoinverse.
//!
//! The node-by-edge incidence matrix is called `E` here (`incidence`), to
//! keep `B` free for the infection matrix.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Tolerance};

/// Tolerance of the zero-row-sum and symmetry checks on Laplacians.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, w: f64) -> Self {
        Edge { i, j, w }
    }
}

/// Undirected graph with real (possibly negative) edge weights, no
/// self-loops and at most one edge per unordered pair. Nodes are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &edges {
            if e.i >= n || e.j >= n {
                return Err(Error::NodeOutOfRange {
                    node: e.i.max(e.j) + 1,
                    n,
                });
            }
            if e.i == e.j {
                return Err(Error::SelfLoop(e.i + 1));
            }
            if !e.w.is_finite() {
                return Err(Error::NonFinite {
                    what: "edge weight",
                    location: format!("({}, {})", e.i + 1, e.j + 1),
                });
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::DuplicateEdge(e.i + 1, e.j + 1));
            }
        }
        Ok(WeightedGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }
}

/// Symmetric matrix with zero row sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedLaplacian {
    #[serde(with = "linalg::dense_rows")]
    matrix: DMatrix<f64>,
    #[serde(skip)]
    provenance: Option<WeightedGraph>,
}

impl SignedLaplacian {
    /// Checks squareness, symmetry and zero row sums, each to
    /// [`ROW_SUM_TOL`] relative to the largest entry.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "Laplacian must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = linalg::max_abs(&matrix).max(1.0);
        let n = matrix.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (matrix[(i, j)], matrix[(j, i)]);
                if (a - b).abs() > ROW_SUM_TOL * scale {
                    return Err(Error::Asymmetric {
                        i: i + 1,
                        j: j + 1,
                        a,
                        b,
                    });
                }
            }
            let row_sum: f64 = matrix.row(i).sum();
            if row_sum.abs() > ROW_SUM_TOL * scale * n as f64 {
                return Err(Error::InvalidParameter(format!(
                    "row {} of Laplacian sums to {row_sum:e}",
                    i + 1
                )));
            }
        }
        Ok(SignedLaplacian {
            matrix: linalg::symmetrize(&matrix),
            provenance: None,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn provenance(&self) -> Option<&WeightedGraph> {
        self.provenance.as_ref()
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute row sum; zero up to rounding for any valid value.
    pub fn max_row_sum(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.sum().abs())
            .fold(0.0, f64::max)
    }
}

/// `l_ij = -w_ij` off the diagonal, `l_ii = sum_{k != i} w_ik`.
pub fn laplacian_from_weights(g: &WeightedGraph) -> SignedLaplacian {
    let mut m = DMatrix::zeros(g.n, g.n);
    for e in &g.edges {
        m[(e.i, e.j)] -= e.w;
        m[(e.j, e.i)] -= e.w;
        m[(e.i, e.i)] += e.w;
        m[(e.j, e.j)] += e.w;
    }
    SignedLaplacian {
        matrix: m,
        provenance: Some(g.clone()),
    }
}

/// Which endpoint of each edge receives the `+1` in the incidence matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Orientation {
    /// The smaller node index is the head.
    #[default]
    LowerIndexHead,
    /// One flag per edge; `true` makes the larger index the head.
    Flipped(Vec<bool>),
}

/// `L = E · diag(w) · Eᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceFactorization {
    pub incidence: DMatrix<f64>,
    pub weight_diag: DVector<f64>,
}

impl IncidenceFactorization {
    pub fn product(&self) -> DMatrix<f64> {
        &self.incidence * DMatrix::from_diagonal(&self.weight_diag) * self.incidence.transpose()
    }
}

pub fn incidence_factorization(
    g: &WeightedGraph,
    orientation: &Orientation,
) -> Result<IncidenceFactorization> {
    let flips = match orientation {
        Orientation::LowerIndexHead => vec![false; g.m()],
        Orientation::Flipped(flags) if flags.len() == g.m() => flags.clone(),
        Orientation::Flipped(flags) => {
            return Err(Error::Dimension(format!(
                "orientation has {} flags for {} edges",
                flags.len(),
                g.m()
            )))
        }
    };
    let mut incidence = DMatrix::zeros(g.n, g.m());
    for (k, (e, flip)) in g.edges.iter().zip(flips).enumerate() {
        let (lo, hi) = (e.i.min(e.j), e.i.max(e.j));
        let (head, tail) = if flip { (hi, lo) } else { (lo, hi) };
        incidence[(head, k)] = 1.0;
        incidence[(tail, k)] = -1.0;
    }
    Ok(IncidenceFactorization {
        incidence,
        weight_diag: DVector::from_iterator(g.m(), g.edges.iter().map(|e| e.w)),
    })
}

/// Splits edges by weight sign. Zero-weight edges go to the positive part.
pub fn split_signed(g: &WeightedGraph) -> (WeightedGraph, WeightedGraph) {
    let (pos, neg): (Vec<Edge>, Vec<Edge>) = g.edges.iter().partition(|e| e.w >= 0.0);
    (
        WeightedGraph { n: g.n, edges: pos },
        WeightedGraph { n: g.n, edges: neg },
    )
}

/// Orthonormal basis `Q` (n × (n-1)) of the complement of the all-ones
/// vector: `QᵀQ = I` and `Qᵀ1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionBasis {
    pub q: DMatrix<f64>,
}

/// Deterministic complement basis: the first `n - 1` columns of the
/// Householder reflector that maps `1/√n` onto `e_n`.
pub fn complement_basis(n: usize) -> Result<ProjectionBasis> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "complement basis needs n >= 2, got {n}"
        )));
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    v[n - 1] -= 1.0;
    let vv = v.dot(&v);
    let reflector = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    Ok(ProjectionBasis {
        q: reflector.columns(0, n - 1).into_owned(),
    })
}

/// `λ₁(QᵀLQ)`, the smallest eigenvalue on the complement of `1`.
pub fn projected_lambda_min(l: &SignedLaplacian) -> Result<f64> {
    let q = complement_basis(l.n())?.q;
    linalg::smallest_eigenvalue(&linalg::symmetrize(&(q.transpose() * l.matrix() * &q)))
}

/// True iff `L ⪰ 0` with a simple zero eigenvalue, i.e. `λ₁(QᵀLQ) > tol`.
pub fn is_psd_simple_zero(l: &SignedLaplacian, tol: Tolerance) -> Result<bool> {
    let tau = tol.resolve(l.matrix());
    Ok(projected_lambda_min(l)? > tau)
}

/// `L† = Q (QᵀLQ)⁻¹ Qᵀ`, defined when `L ⪰ 0` has a simple zero.
///
/// Indefinite inputs are rejected rather than extended.
pub fn laplacian_pseudoinverse(l: &SignedLaplacian, tol: Tolerance) -> Result<DMatrix<f64>> {
    let q = complement_basis(l.n())?.q;
    let projected = linalg::symmetrize(&(q.transpose() * l.matrix() * &q));
    let lambda_min = linalg::smallest_eigenvalue(&projected)?;
    let tau = tol.resolve(l.matrix());
    if lambda_min <= tau {
        return Err(Error::NotPsdSimpleZero {
            lambda_min,
            tol: tau,
        });
    }
    let inverse = projected
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NotPsdSimpleZero {
            lambda_min,
            tol: tau,
        })?;
    Ok(linalg::symmetrize(&(&q * inverse * q.transpose())))
}

/// `(e_a - e_b)ᵀ L† (e_a - e_b)`.
pub fn effective_resistance(pinv: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let v = linalg::unit_difference(pinv.nrows(), a, b);
    v.dot(&(pinv * &v))
}

/// `H = L + D`: a loopless Laplacian plus self-loop weights on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopyLaplacian {
    pub loopless: SignedLaplacian,
    pub self_loops: DVector<f64>,
}

impl LoopyLaplacian {
    pub fn new(loopless: SignedLaplacian, self_loops: DVector<f64>) -> Result<Self> {
        if self_loops.len() != loopless.n() {
            return Err(Error::Dimension(format!(
                "{} self-loops for a {}-node Laplacian",
                self_loops.len(),
                loopless.n()
            )));
        }
        Ok(LoopyLaplacian {
            loopless,
            self_loops,
        })
    }

    /// Decomposes a symmetric matrix into its loopless part and the row
    /// sums as self-loops.
    pub fn from_matrix(h: &DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::Dimension("loopy Laplacian must be square".into()));
        }
        let n = h.nrows();
        let self_loops = DVector::from_iterator(n, h.row_iter().map(|r| r.sum()));
        let loopless = SignedLaplacian::from_matrix(h - DMatrix::from_diagonal(&self_loops))?;
        Self::new(loopless, self_loops)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.loopless.matrix() + DMatrix::from_diagonal(&self.self_loops)
    }

    pub fn is_strictly_loopy(&self) -> bool {
        self.self_loops.iter().any(|&w| w != 0.0)
    }
}

/// Turns every self-loop `w_ii` into an edge `(i, n+1)` to a new grounded
/// node: `[[H, -D1], [-1ᵀD, Σ w_ii]]`.
pub fn augment(h: &LoopyLaplacian) -> Result<SignedLaplacian> {
    if !h.is_strictly_loopy() {
        return Err(Error::NotStrictlyLoopy);
    }
    Ok(SignedLaplacian {
        matrix: bordered(&h.matrix(), &h.self_loops),
        provenance: None,
    })
}

/// `[[top, -d], [-dᵀ, Σd]]`.
pub(crate) fn bordered(top: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let n = top.nrows();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(top);
    for k in 0..n {
        m[(k, n)] = -d[k];
        m[(n, k)] = -d[k];
    }
    m[(n, n)] = d.sum();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::new(n, edges.iter().map(|&(i, j, w)| Edge::new(i, j, w)).collect()).unwrap()
    }

    fn triangle() -> WeightedGraph {
        graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    }

    fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        linalg::to_rows(m)
    }

    #[test]
    fn single_edge_laplacian() {
        let l = laplacian_from_weights(&graph(2, &[(0, 1, 2.5)]));
        assert_eq!(rows(l.matrix()), vec![vec![2.5, -2.5], vec![-2.5, 2.5]]);
        assert_eq!(l.provenance().unwrap().m(), 1);
    }

    #[test]
    fn triangle_laplacian() {
        let l = laplacian_from_weights(&triangle());
        assert_eq!(
            rows(l.matrix()),
            vec![vec![2.0, -1.0, -1.0], vec![-1.0, 2.0, -1.0], vec![-1.0, -1.0, 2.0]]
        );
    }

    #[test]
    fn signed_path_laplacian() {
        let l = laplacian_from_weights(&graph(3, &[(0, 1, 1.0), (1, 2, -0.5)]));
        assert_eq!(
            rows(l.matrix()),
            vec![vec![1.0, -1.0, 0.0], vec![-1.0, 0.5, 0.5], vec![0.0, 0.5, -0.5]]
        );
    }

    #[test]
    fn graph_rejects_self_loop_and_duplicates() {
        assert_eq!(
            WeightedGraph::new(2, vec![Edge::new(1, 1, 1.0)]),
            Err(Error::SelfLoop(2))
        );
        assert_eq!(
            WeightedGraph::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]),
            Err(Error::DuplicateEdge(2, 1))
        );
        assert!(WeightedGraph::new(2, vec![Edge::new(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn incidence_single_edge_both_orientations() {
        let g = graph(2, &[(0, 1, 3.0)]);
        let f = incidence_factorization(&g, &Orientation::default()).unwrap();
        assert_eq!(f.incidence.column(0).as_slice(), &[1.0, -1.0]);
        assert_eq!(f.weight_diag.as_slice(), &[3.0]);
        let r = incidence_factorization(&g, &Orientation::Flipped(vec![true])).unwrap();
        assert_eq!(r.incidence.column(0).as_slice(), &[-1.0, 1.0]);
        assert_eq!(f.product(), r.product());
        assert_eq!(&f.product(), laplacian_from_weights(&g).matrix());
    }

    #[test]
    fn incidence_triangle_any_orientation() {
        let g = triangle();
        let l = laplacian_from_weights(&g);
        for mask in 0..8u32 {
            let flips = (0..3).map(|k| mask & (1 << k) != 0).collect();
            let f = incidence_factorization(&g, &Orientation::Flipped(flips)).unwrap();
            assert_abs_diff_eq!(f.product(), l.matrix().clone(), epsilon = 1e-12);
        }
        assert!(incidence_factorization(&g, &Orientation::Flipped(vec![true])).is_err());
    }

    #[test]
    fn split_signed_partitions_edges() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, -0.5)]);
        let (pos, neg) = split_signed(&g);
        assert_eq!(pos.edges(), &[Edge::new(0, 1, 1.0)]);
        assert_eq!(neg.edges(), &[Edge::new(1, 2, -0.5)]);

        let (pos, neg) = split_signed(&triangle());
        assert_eq!(pos.m(), 3);
        assert_eq!(neg.m(), 0);

        let (pos, neg) = split_signed(&graph(3, &[]));
        assert_eq!((pos.m(), neg.m()), (0, 0));
        assert_eq!(laplacian_from_weights(&pos).matrix(), &DMatrix::zeros(3, 3));
    }

    #[test]
    fn zero_weight_edges_are_positive() {
        let (pos, neg) = split_signed(&graph(2, &[(0, 1, 0.0)]));
        assert_eq!((pos.m(), neg.m()), (1, 0));
    }

    #[test]
    fn complement_basis_small() {
        let q = complement_basis(2).unwrap().q;
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(q[(0, 0)], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(q[(1, 0)], s, epsilon = 1e-15);
        assert!(complement_basis(1).is_err());
    }

    #[test]
    fn complement_basis_contract() {
        let q = complement_basis(5).unwrap().q;
        assert_abs_diff_eq!(q.transpose() * &q, DMatrix::identity(4, 4), epsilon = 1e-12);
        assert_abs_diff_eq!(
            q.transpose() * DVector::from_element(5, 1.0),
            DVector::zeros(4),
            epsilon = 1e-12
        );
        let again = complement_basis(5).unwrap().q;
        assert!(q.iter().zip(again.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn psd_simple_zero_cases() {
        let tol = Tolerance::default();
        assert!(is_psd_simple_zero(&laplacian_from_weights(&triangle()), tol).unwrap());

        let signed = laplacian_from_weights(&graph(3, &[(0, 1, 1.0), (1, 2, -0.5)]));
        assert!(!is_psd_simple_zero(&signed, tol).unwrap());

        let split = laplacian_from_weights(&graph(4, &[(0, 1, 1.0), (2, 3, 1.0)]));
        assert!(!is_psd_simple_zero(&split, tol).unwrap());
    }

    #[test]
    fn pseudoinverse_of_single_edge() {
        let l = SignedLaplacian::from_matrix(DMatrix::from_row_slice(2, 2, &[1., -1., -1., 1.])).unwrap();
        let p = laplacian_pseudoinverse(&l, Tolerance::default()).unwrap();
        assert_abs_diff_eq!(
            p,
            DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn path_endpoints_resistance_is_series_sum() {
        let l = laplacian_from_weights(&graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]));
        let p = laplacian_pseudoinverse(&l, Tolerance::default()).unwrap();
        assert_abs_diff_eq!(effective_resistance(&p, 0, 2), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p * DVector::from_element(3, 1.0), DVector::zeros(3), epsilon = 1e-9);
    }

    #[test]
    fn pseudoinverse_rejects_indefinite() {
        let signed = laplacian_from_weights(&graph(3, &[(0, 1, 1.0), (1, 2, -0.5)]));
        assert!(matches!(
            laplacian_pseudoinverse(&signed, Tolerance::default()),
            Err(Error::NotPsdSimpleZero { .. })
        ));
    }

    #[test]
    fn from_matrix_checks_row_sums() {
        assert!(SignedLaplacian::from_matrix(DMatrix::identity(2, 2)).is_err());
        assert!(SignedLaplacian::from_matrix(DMatrix::from_row_slice(2, 2, &[1., -1., -0.5, 0.5])).is_err());
        assert!(SignedLaplacian::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn augment_single_node() {
        let h = LoopyLaplacian::new(
            SignedLaplacian::from_matrix(DMatrix::zeros(1, 1)).unwrap(),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        let a = augment(&h).unwrap();
        assert_eq!(rows(a.matrix()), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
    }

    #[test]
    fn augment_two_nodes() {
        let h = LoopyLaplacian::from_matrix(&DMatrix::from_row_slice(2, 2, &[2.5, -1., -1., 0.5])).unwrap();
        assert_eq!(h.self_loops.as_slice(), &[1.5, -0.5]);
        assert_eq!(rows(h.loopless.matrix()), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let a = augment(&h).unwrap();
        assert_eq!(
            rows(a.matrix()),
            vec![vec![2.5, -1.0, -1.5], vec![-1.0, 0.5, 0.5], vec![-1.5, 0.5, 1.0]]
        );
        assert!(a.max_row_sum() < 1e-12);
    }

    #[test]
    fn augment_rejects_loopless() {
        let h = LoopyLaplacian::new(laplacian_from_weights(&triangle()), DVector::zeros(3)).unwrap();
        assert_eq!(augment(&h), Err(Error::NotStrictlyLoopy));
        assert!(LoopyLaplacian::new(laplacian_from_weights(&triangle()), DVector::zeros(2)).is_err());
    }
}
