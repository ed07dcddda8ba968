//! Small dense helpers shared by the analytic modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative factor of the default positive-definiteness tolerance.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-8;

const EIGEN_MAX_ITER: usize = 100_000;

/// Tolerance used when deciding whether an eigenvalue is "positive".
///
/// The default scales with the infinity norm of the matrix under test so
/// that large-magnitude models are not misclassified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `factor * max(1, ||M||_inf)`.
    Relative(f64),
    /// A fixed threshold.
    Absolute(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(DEFAULT_RELATIVE_TOL)
    }
}

impl Tolerance {
    pub fn resolve(self, m: &DMatrix<f64>) -> f64 {
        match self {
            Tolerance::Relative(factor) => factor * inf_norm(m).max(1.0),
            Tolerance::Absolute(tol) => tol,
        }
    }
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn smallest_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    sorted_eigenvalues(m).map(|v| v[0])
}

/// `(A + Aᵀ) / 2`, to wash out rounding asymmetry after products.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// `e_a - e_b` in dimension `n`.
pub fn unit_difference(n: usize, a: usize, b: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[a] += 1.0;
    v[b] -= 1.0;
    v
}

/// Serde adapter writing a dense matrix as an array of rows.
pub(crate) mod dense_rows {
    use nalgebra::DMatrix;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(super::to_rows(m))
    }
}
