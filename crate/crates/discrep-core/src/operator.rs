//! Finite-dimensional vectors and linear operators.
//!
//! Everything downstream is written against the Euclidean inner product on
//! `R^n`. An operator carries one of three representations:
//!
//! - dense row-major matrix,
//! - diagonal spectrum,
//! - circular convolution kernel (periodic, length n).
//!
//! Operators and vectors are immutable after construction; `apply`,
//! `apply_adjoint` and `svd` are pure and safe to call concurrently. The SVD
//! is computed at most once per operator handle and cached, since the
//! discrepancy root-finder evaluates many regularization parameters against
//! a fixed operator.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OperatorError {
    #[error("dimension mismatch in {what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("{what} must have at least one entry")]
    Empty { what: &'static str },
    #[error("matrix data has {got} entries, expected rows*cols = {expected}")]
    BadShape { expected: usize, got: usize },
    #[error("SVD is not supported for the circular-convolution representation; densify first")]
    SvdUnsupported,
    #[error("SVD iteration failed to converge")]
    SvdFailed,
}

fn check_finite(what: &'static str, entries: &[f64]) -> Result<(), OperatorError> {
    if entries.is_empty() {
        return Err(OperatorError::Empty { what });
    }
    for (index, &value) in entries.iter().enumerate() {
        if !value.is_finite() {
            return Err(OperatorError::NonFinite { index, value });
        }
    }
    Ok(())
}

/// A vector in `R^n` with finite entries, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self, OperatorError> {
        check_finite("vector", &entries)?;
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![0.0; dim],
        }
    }

    /// Wrap entries produced by internal arithmetic. The caller guarantees
    /// finiteness (all internal computations preserve it for finite inputs).
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|x| x.is_finite()));
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        dot(&self.entries, &other.entries)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.entries, &self.entries)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn dist(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dist of mismatched dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
enum Repr {
    /// Row-major `rows x cols` matrix.
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    /// Square operator `diag(d)`.
    Diagonal { entries: Vec<f64> },
    /// Circular convolution on `n = kernel.len()` grid points:
    /// `(Au)_i = Σ_j k_{(i−j) mod n} u_j`.
    Convolution { kernel: Vec<f64> },
}

/// One thin singular value decomposition `A = Σ σ_i u_i v_iᵀ`.
///
/// `singular_values` is nonincreasing and nonnegative; `left[i]` and
/// `right[i]` are the corresponding orthonormal singular vectors.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub singular_values: Vec<f64>,
    pub left: Vec<Vector>,
    pub right: Vec<Vector>,
}

impl SvdFactors {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

/// A bounded linear operator `A: R^cols → R^rows`.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    repr: Repr,
    svd_cache: OnceLock<Result<SvdFactors, OperatorError>>,
}

impl LinearOperator {
    /// Dense operator from row-major data with `data.len() == rows * cols`.
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, OperatorError> {
        if rows == 0 || cols == 0 {
            return Err(OperatorError::Empty { what: "matrix" });
        }
        if data.len() != rows * cols {
            return Err(OperatorError::BadShape {
                expected: rows * cols,
                got: data.len(),
            });
        }
        check_finite("matrix", &data)?;
        Ok(Self::from_repr(Repr::Dense { rows, cols, data }))
    }

    /// Dense operator from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, OperatorError> {
        if rows.is_empty() {
            return Err(OperatorError::Empty { what: "matrix" });
        }
        let cols = rows[0].len();
        for row in rows {
            if row.len() != cols {
                return Err(OperatorError::BadShape {
                    expected: cols,
                    got: row.len(),
                });
            }
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::dense(rows.len(), cols, data)
    }

    pub fn diagonal(entries: Vec<f64>) -> Result<Self, OperatorError> {
        check_finite("diagonal", &entries)?;
        Ok(Self::from_repr(Repr::Diagonal { entries }))
    }

    /// Circular convolution with the given kernel (grid size = kernel length).
    pub fn convolution(kernel: Vec<f64>) -> Result<Self, OperatorError> {
        check_finite("kernel", &kernel)?;
        Ok(Self::from_repr(Repr::Convolution { kernel }))
    }

    fn from_repr(repr: Repr) -> Self {
        Self {
            repr,
            svd_cache: OnceLock::new(),
        }
    }

    pub fn rows(&self) -> usize {
        match &self.repr {
            Repr::Dense { rows, .. } => *rows,
            Repr::Diagonal { entries } => entries.len(),
            Repr::Convolution { kernel } => kernel.len(),
        }
    }

    pub fn cols(&self) -> usize {
        match &self.repr {
            Repr::Dense { cols, .. } => *cols,
            Repr::Diagonal { entries } => entries.len(),
            Repr::Convolution { kernel } => kernel.len(),
        }
    }

    pub fn is_convolution(&self) -> bool {
        matches!(self.repr, Repr::Convolution { .. })
    }

    /// `Au`. Dense is row-by-row dot products, diagonal is entrywise,
    /// convolution is the periodic sum.
    pub fn apply(&self, u: &Vector) -> Result<Vector, OperatorError> {
        if u.dim() != self.cols() {
            return Err(OperatorError::DimensionMismatch {
                what: "apply",
                expected: self.cols(),
                got: u.dim(),
            });
        }
        Ok(Vector::from_raw(self.apply_slice(u.as_slice())))
    }

    /// `A*v`; for real matrices the adjoint is the transpose.
    pub fn apply_adjoint(&self, v: &Vector) -> Result<Vector, OperatorError> {
        if v.dim() != self.rows() {
            return Err(OperatorError::DimensionMismatch {
                what: "apply_adjoint",
                expected: self.rows(),
                got: v.dim(),
            });
        }
        Ok(Vector::from_raw(self.adjoint_slice(v.as_slice())))
    }

    pub(crate) fn apply_slice(&self, u: &[f64]) -> Vec<f64> {
        match &self.repr {
            Repr::Dense { rows, cols, data } => (0..*rows)
                .map(|i| dot(&data[i * cols..(i + 1) * cols], u))
                .collect(),
            Repr::Diagonal { entries } => entries.iter().zip(u).map(|(d, x)| d * x).collect(),
            Repr::Convolution { kernel } => {
                let n = kernel.len();
                (0..n)
                    .map(|i| (0..n).map(|j| kernel[(n + i - j) % n] * u[j]).sum())
                    .collect()
            }
        }
    }

    pub(crate) fn adjoint_slice(&self, v: &[f64]) -> Vec<f64> {
        match &self.repr {
            Repr::Dense { rows, cols, data } => (0..*cols)
                .map(|j| (0..*rows).map(|i| data[i * cols + j] * v[i]).sum())
                .collect(),
            Repr::Diagonal { entries } => entries.iter().zip(v).map(|(d, x)| d * x).collect(),
            Repr::Convolution { kernel } => {
                // Correlation: (A*v)_j = Σ_i k_{(i−j) mod n} v_i.
                let n = kernel.len();
                (0..n)
                    .map(|j| (0..n).map(|i| kernel[(n + i - j) % n] * v[i]).sum())
                    .collect()
            }
        }
    }

    /// Thin SVD with singular values sorted nonincreasing. Computed once and
    /// cached. The convolution representation is rejected; densify first.
    pub fn svd(&self) -> Result<&SvdFactors, OperatorError> {
        if self.is_convolution() {
            return Err(OperatorError::SvdUnsupported);
        }
        self.svd_cache
            .get_or_init(|| self.compute_svd())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_svd(&self) -> Result<SvdFactors, OperatorError> {
        match &self.repr {
            Repr::Diagonal { entries } => {
                let n = entries.len();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| entries[b].abs().total_cmp(&entries[a].abs()));
                let mut factors = SvdFactors {
                    singular_values: Vec::with_capacity(n),
                    left: Vec::with_capacity(n),
                    right: Vec::with_capacity(n),
                };
                for &i in &order {
                    let d = entries[i];
                    let mut u = vec![0.0; n];
                    let mut v = vec![0.0; n];
                    u[i] = if d < 0.0 { -1.0 } else { 1.0 };
                    v[i] = 1.0;
                    factors.singular_values.push(d.abs());
                    factors.left.push(Vector::from_raw(u));
                    factors.right.push(Vector::from_raw(v));
                }
                Ok(factors)
            }
            Repr::Dense { rows, cols, data } => {
                let m = DMatrix::from_row_slice(*rows, *cols, data);
                let svd = m
                    .try_svd(true, true, f64::EPSILON, 10_000)
                    .ok_or(OperatorError::SvdFailed)?;
                let u_mat = svd.u.expect("u requested");
                let v_t = svd.v_t.expect("v_t requested");
                let k = svd.singular_values.len();
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
                let mut factors = SvdFactors {
                    singular_values: Vec::with_capacity(k),
                    left: Vec::with_capacity(k),
                    right: Vec::with_capacity(k),
                };
                for &i in &order {
                    factors.singular_values.push(svd.singular_values[i]);
                    factors
                        .left
                        .push(Vector::from_raw(u_mat.column(i).iter().copied().collect()));
                    factors
                        .right
                        .push(Vector::from_raw(v_t.row(i).iter().copied().collect()));
                }
                Ok(factors)
            }
            Repr::Convolution { .. } => Err(OperatorError::SvdUnsupported),
        }
    }

    /// A dense copy of this operator (identical action, dense representation).
    pub fn densified(&self) -> LinearOperator {
        match &self.repr {
            Repr::Dense { .. } => self.clone(),
            Repr::Diagonal { entries } => {
                let n = entries.len();
                let mut data = vec![0.0; n * n];
                for (i, d) in entries.iter().enumerate() {
                    data[i * n + i] = *d;
                }
                Self::from_repr(Repr::Dense {
                    rows: n,
                    cols: n,
                    data,
                })
            }
            Repr::Convolution { kernel } => {
                let n = kernel.len();
                let mut data = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        data[i * n + j] = kernel[(n + i - j) % n];
                    }
                }
                Self::from_repr(Repr::Dense {
                    rows: n,
                    cols: n,
                    data,
                })
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.repr {
            Repr::Dense { data, .. } => dot(data, data).sqrt(),
            Repr::Diagonal { entries } => dot(entries, entries).sqrt(),
            Repr::Convolution { kernel } => (kernel.len() as f64 * dot(kernel, kernel)).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(a: f64, b: f64) -> Vector {
        Vector::new(vec![a, b]).unwrap()
    }

    #[test]
    fn vector_rejects_non_finite_and_empty() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(OperatorError::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            Vector::new(vec![f64::INFINITY]),
            Err(OperatorError::NonFinite { index: 0, .. })
        ));
        assert!(matches!(
            Vector::new(vec![]),
            Err(OperatorError::Empty { .. })
        ));
    }

    #[test]
    fn apply_diagonal_action() {
        let op = LinearOperator::diagonal(vec![1.0, 0.5]).unwrap();
        let out = op.apply(&vec2(1.0, 1.0)).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.5]);
    }

    #[test]
    fn apply_zero_vector_gives_zero() {
        let op = LinearOperator::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let out = op.apply(&Vector::zeros(2)).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn apply_dense_matches_hand_product() {
        // [[1,2],[3,4]] (1,1)^T = (3,7)^T
        let op = LinearOperator::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let out = op.apply(&vec2(1.0, 1.0)).unwrap();
        assert_eq!(out.as_slice(), &[3.0, 7.0]);
    }

    #[test]
    fn adjoint_diagonal_is_self() {
        let op = LinearOperator::diagonal(vec![1.0, 0.5]).unwrap();
        let out = op.apply_adjoint(&vec2(1.0, 1.0)).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.5]);
    }

    #[test]
    fn adjoint_dense_is_transpose() {
        // [[1,2],[3,4]]^T (1,0)^T picks the first row: (1,2)^T
        let op = LinearOperator::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let out = op.apply_adjoint(&vec2(1.0, 0.0)).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn apply_dimension_mismatch_is_rejected() {
        let op = LinearOperator::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let err = op.apply(&vec2(1.0, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            OperatorError::DimensionMismatch {
                expected: 3,
                got: 2,
                ..
            }
        ));
        let err = op.apply_adjoint(&vec2(1.0, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            OperatorError::DimensionMismatch {
                expected: 1,
                got: 2,
                ..
            }
        ));
    }

    #[test]
    fn svd_diagonal_sorts_spectrum() {
        let op = LinearOperator::diagonal(vec![0.5, 1.0]).unwrap();
        let svd = op.svd().unwrap();
        assert_eq!(svd.singular_values, vec![1.0, 0.5]);
        // Axes are permuted to match the sorted spectrum.
        assert_eq!(svd.right[0].as_slice(), &[0.0, 1.0]);
        assert_eq!(svd.right[1].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn svd_handles_negative_diagonal_entries() {
        let op = LinearOperator::diagonal(vec![-2.0, 1.0]).unwrap();
        let svd = op.svd().unwrap();
        assert_eq!(svd.singular_values, vec![2.0, 1.0]);
        assert_eq!(svd.left[0].as_slice(), &[-1.0, 0.0]);
        assert_eq!(svd.right[0].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn svd_two_by_two_hilbert_matches_characteristic_polynomial() {
        // A = [[1, 1/2], [1/2, 1/3]] is symmetric positive definite, so its
        // singular values are its eigenvalues (4 ± √13)/6.
        let op = LinearOperator::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0 / 3.0]]).unwrap();
        let svd = op.svd().unwrap();
        let expected_hi = (4.0 + 13f64.sqrt()) / 6.0;
        let expected_lo = (4.0 - 13f64.sqrt()) / 6.0;
        assert!((svd.singular_values[0] - expected_hi).abs() < 1e-12);
        assert!((svd.singular_values[1] - expected_lo).abs() < 1e-12);
    }

    #[test]
    fn svd_zero_matrix() {
        let op = LinearOperator::dense(3, 2, vec![0.0; 6]).unwrap();
        let svd = op.svd().unwrap();
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn svd_convolution_unsupported_until_densified() {
        let op = LinearOperator::convolution(vec![0.5, 0.25, 0.25]).unwrap();
        assert!(matches!(op.svd(), Err(OperatorError::SvdUnsupported)));
        assert!(op.densified().svd().is_ok());
    }

    #[test]
    fn densified_convolution_has_same_action() {
        let kernel = vec![0.6, 0.2, 0.1, 0.1];
        let op = LinearOperator::convolution(kernel).unwrap();
        let dense = op.densified();
        let u = Vector::new(vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        let a = op.apply(&u).unwrap();
        let b = dense.apply(&u).unwrap();
        assert!(a.dist(&b) < 1e-14);
        let v = Vector::new(vec![0.3, 0.1, -1.0, 2.0]).unwrap();
        let a = op.apply_adjoint(&v).unwrap();
        let b = dense.apply_adjoint(&v).unwrap();
        assert!(a.dist(&b) < 1e-14);
    }

    #[test]
    fn svd_cache_returns_same_factors() {
        let op = LinearOperator::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let first = op.svd().unwrap() as *const SvdFactors;
        let second = op.svd().unwrap() as *const SvdFactors;
        assert_eq!(first, second);
    }
}
