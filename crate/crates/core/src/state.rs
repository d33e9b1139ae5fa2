//! Probability vectors, sorted spectra and density operators.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};

/// Tolerance on sums and traces that must equal one.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues in [-CLAMP_TOL, 0) are treated as rounding and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-10;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::LengthMismatch(0, 1));
        }
        if let Some(&bad) = values.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::BadProbability(bad));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self(values))
    }

    /// Normalizes nonnegative weights; all-zero input is rejected.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        Self(alloc::vec![1.0 / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Real values kept in descending order.
///
/// Sorting is stable, so equal values keep the order they arrived in.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector(Vec<f64>);

impl SpectrumVector {
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        Self(values)
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// A probability spectrum: entries within [-1e-12, 1+1e-12], summing to one.
    pub fn probability(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values
            .iter()
            .find(|&&v| !v.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&v))
        {
            return Err(Error::BadProbability(bad));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self::from_unsorted(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Positive, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (vals, _) = eig_hermitian(&matrix)?;
        let min = vals.values().last().copied().unwrap_or(0.0);
        if min < -CLAMP_TOL {
            return Err(Error::NotPositive(min));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Normalizes a nonzero positive matrix by its trace.
    pub fn from_unnormalized(matrix: &ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::NotNormalized(tr));
        }
        Self::new(matrix.scale(1.0 / tr))
    }

    /// Wraps a matrix already known to be a state up to rounding.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let nrm = crate::linalg::norm(ket);
        if !(nrm > 0.0) {
            return Err(Error::NotNormalized(nrm));
        }
        let unit: Vec<Complex64> = ket.iter().map(|z| z / nrm).collect();
        Ok(Self {
            matrix: ComplexMatrix::projector(&unit),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut d = alloc::vec![0.0; dim];
        d[index] = 1.0;
        Self {
            matrix: ComplexMatrix::from_real_diag(&d),
        }
    }

    pub fn diagonal(p: &ProbVector) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(p.values()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues, descending, with rounding negatives clamped to zero.
    pub fn spectrum(&self) -> SpectrumVector {
        let (vals, _) = eig_hermitian(&self.matrix).expect("density operator is Hermitian");
        SpectrumVector::from_sorted_unchecked(vals.values().iter().map(|&v| v.max(0.0)).collect())
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.spectrum().values().iter().filter(|&&v| v > tol).count()
    }

    /// Dominant eigenvector; for a pure state this is the ket.
    pub fn principal_ket(&self) -> Vec<Complex64> {
        let (_, vecs) = eig_hermitian(&self.matrix).expect("density operator is Hermitian");
        vecs.column(0)
    }
}
