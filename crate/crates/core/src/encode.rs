//! Ensembles of states with priors, and the outcome kernels Q(j|i) a
//! measurement induces on them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measure::{Measurement, ZERO_PROB};
use crate::state::{DensityOperator, ProbVector};

/// Rank threshold for the pure flag.
pub const PURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: ProbVector,
    states: Vec<DensityOperator>,
    pure: bool,
}

impl Ensemble {
    pub fn new(priors: ProbVector, states: Vec<DensityOperator>) -> Result<Self> {
        if priors.len() != states.len() {
            return Err(Error::LengthMismatch(priors.len(), states.len()));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        let pure = states.iter().all(|s| s.rank(PURE_TOL) <= 1);
        Ok(Self {
            priors,
            states,
            pure,
        })
    }

    /// Uniform priors over the columns of `basis` (computational basis when
    /// `None`).
    pub fn uniform_basis(dim: usize, basis: Option<&ComplexMatrix>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let states = match basis {
            None => (0..dim).map(|k| DensityOperator::basis(dim, k)).collect(),
            Some(u) => {
                if u.dim() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        got: u.dim(),
                    });
                }
                let d = u.unitarity_defect();
                if d > 1e-9 {
                    return Err(Error::NotUnitary(d));
                }
                (0..dim)
                    .map(|k| DensityOperator::pure(&u.column(k)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Self::new(ProbVector::uniform(dim), states)
    }

    /// Computational basis states weighted by `priors`.
    pub fn diagonal(priors: &ProbVector) -> Self {
        let n = priors.len();
        Self {
            priors: priors.clone(),
            states: (0..n).map(|k| DensityOperator::basis(n, k)).collect(),
            pure: true,
        }
    }

    pub fn priors(&self) -> &ProbVector {
        &self.priors
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// ρ = Σ_i P(i) ρ_i
    pub fn density(&self) -> DensityOperator {
        let parts: Vec<ComplexMatrix> = self
            .priors
            .values()
            .iter()
            .zip(&self.states)
            .map(|(p, s)| s.matrix().scale(*p))
            .collect();
        DensityOperator::from_hermitian_unchecked(crate::linalg::sum_matrices(self.dim(), &parts))
    }
}

/// Classical channel Q(j|i), stored by input row.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: Vec<Vec<f64>>,
}

impl Kernel {
    /// Rows are the output distributions Q(·|i); each must sum to one within 1e-9.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).ok_or(Error::EmptyMeasurement)?;
        for row in &rows {
            if row.len() != width {
                return Err(Error::LengthMismatch(row.len(), width));
            }
            if let Some(&bad) = row.iter().find(|v| !v.is_finite() || **v < -1e-12) {
                return Err(Error::BadProbability(bad));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized(total));
            }
        }
        Ok(Self { rows })
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    /// Q(j|i)
    pub fn q(&self, j: usize, i: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Q(j) = Σ_i Q(j|i) P(i)
    pub fn output_distribution(&self, prior: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.outputs()];
        for (row, p) in self.rows.iter().zip(prior) {
            for (o, q) in out.iter_mut().zip(row) {
                *o += p * q;
            }
        }
        out
    }
}

fn check_dims(m: &Measurement, ens: &Ensemble) -> Result<()> {
    if m.dim() != ens.dim() {
        return Err(Error::DimMismatch {
            expected: m.dim(),
            got: ens.dim(),
        });
    }
    Ok(())
}

/// Q(j|i) = Tr[E_j ρ_i]
pub fn conditional_outcome_dist(m: &Measurement, ens: &Ensemble) -> Result<Kernel> {
    check_dims(m, ens)?;
    let effects = m.effects();
    let rows = ens
        .states
        .iter()
        .map(|s| effects.iter().map(|e| e.probability(s).max(0.0)).collect())
        .collect();
    Kernel::new(rows)
}

/// Bayes posterior P(i|j).
pub fn posterior(m: &Measurement, ens: &Ensemble, j: usize) -> Result<ProbVector> {
    if j >= m.len() {
        return Err(Error::OutcomeOutOfRange(j));
    }
    let kernel = conditional_outcome_dist(m, ens)?;
    let joint: Vec<f64> = ens
        .priors
        .values()
        .iter()
        .enumerate()
        .map(|(i, p)| kernel.q(j, i) * p)
        .collect();
    let qj: f64 = joint.iter().sum();
    if qj <= ZERO_PROB {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: j,
            prob: qj,
        });
    }
    Ok(ProbVector::from_weights(joint).expect("positive total"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn plus() -> DensityOperator {
        DensityOperator::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap()
    }

    #[test]
    fn density_examples() {
        let u = Ensemble::uniform_basis(4, None).unwrap();
        assert!(u.density().matrix().distance(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
        assert!(u.is_pure());
        let one = Ensemble::new(ProbVector::new(vec![1.0]).unwrap(), vec![plus()]).unwrap();
        assert_eq!(one.density(), plus());
        let e = Ensemble::new(
            ProbVector::uniform(2),
            vec![DensityOperator::basis(2, 0), plus()],
        )
        .unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.75, 0.25], &[0.25, 0.25]]);
        assert!(e.density().matrix().distance(&expect) < 1e-15);
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(0.5f64.sqrt());
        let rot = Ensemble::uniform_basis(2, Some(&h)).unwrap();
        assert!(rot.density().matrix().distance(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        assert!(matches!(
            Ensemble::uniform_basis(2, Some(&ComplexMatrix::from_real_diag(&[1.0, 2.0]))),
            Err(Error::NotUnitary(_))
        ));
        let mixed = Ensemble::new(ProbVector::uniform(1), vec![DensityOperator::maximally_mixed(2)]).unwrap();
        assert!(!mixed.is_pure());
    }

    #[test]
    fn kernel_examples() {
        let basis = Ensemble::uniform_basis(3, None).unwrap();
        let k = conditional_outcome_dist(&Measurement::projective(3, None), &basis).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k.q(j, i), if i == j { 1.0 } else { 0.0 });
            }
        }
        let b2 = Ensemble::uniform_basis(2, None).unwrap();
        let k = conditional_outcome_dist(&Measurement::binary_symmetric(0.1).unwrap(), &b2).unwrap();
        assert!((k.q(0, 0) - 0.9).abs() < 1e-15 && (k.q(1, 0) - 0.1).abs() < 1e-15);
        assert!((k.q(0, 1) - 0.1).abs() < 1e-15 && (k.q(1, 1) - 0.9).abs() < 1e-15);
        let k = conditional_outcome_dist(&Measurement::identity(2), &b2).unwrap();
        assert_eq!(k.outputs(), 1);
        assert!(k.rows().iter().all(|r| (r[0] - 1.0).abs() < 1e-15));
    }

    #[test]
    fn posterior_examples() {
        let b2 = Ensemble::diagonal(&ProbVector::new(vec![0.3, 0.7]).unwrap());
        let p = posterior(&Measurement::identity(2), &b2, 0).unwrap();
        assert!((p.values()[0] - 0.3).abs() < 1e-15);
        let p = posterior(&Measurement::projective(2, None), &b2, 1).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0]);
        let u = Ensemble::uniform_basis(2, None).unwrap();
        let p = posterior(&Measurement::binary_symmetric(0.1).unwrap(), &u, 0).unwrap();
        assert!((p.values()[0] - 0.9).abs() < 1e-15);
        let certain = Ensemble::diagonal(&ProbVector::new(vec![1.0, 0.0]).unwrap());
        assert!(matches!(
            posterior(&Measurement::projective(2, None), &certain, 1),
            Err(Error::ZeroProbabilityOutcome { .. })
        ));
    }
}
