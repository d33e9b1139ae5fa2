//! Measurements as ordered Kraus operator lists: validity, classification,
//! mixing and concatenation, state update and a few generators.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::encode::Ensemble;
use crate::entropy::clamped_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, hermitian_function, polar_decompose, sqrt_psd, sum_matrices, ComplexMatrix};
use crate::majorize::{is_permutation_closed, next_permutation};
use crate::random::{ginibre, haar_unitary_with, rng_for};
use crate::state::DensityOperator;

/// Completeness tolerance on ‖Σ Ω†Ω − I‖_F.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance used by every classification decision.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Outcomes at or below this probability are treated as impossible.
pub const ZERO_PROB: f64 = 1e-12;

/// Ordered Kraus operators {Ω_n} with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

/// Ω†Ω for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect(ComplexMatrix);

impl Effect {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Tr[E ρ]
    pub fn probability(&self, rho: &DensityOperator) -> f64 {
        self.0.trace_product_re(rho.matrix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub complete: bool,
    pub defect: f64,
}

/// Measurement classes; `classical_compatible` is only decided when a state
/// is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassificationReport {
    pub bare: bool,
    pub classical_compatible: Option<bool>,
    pub commutative: bool,
    pub complete: bool,
    pub finite_strength: bool,
    pub permutation_symmetric: bool,
    pub von_neumann: bool,
}

impl ClassificationReport {
    pub fn incomplete(&self) -> bool {
        !self.complete
    }

    pub fn infinite_strength(&self) -> bool {
        !self.finite_strength
    }

    /// Flag names in a fixed order.
    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |on: bool, name| {
            if on {
                out.push(name)
            }
        };
        push(self.bare, "bare");
        push(self.classical_compatible == Some(true), "classical-compatible");
        push(self.commutative, "commutative");
        push(self.complete, "complete");
        push(self.finite_strength, "finite-strength");
        push(!self.finite_strength, "infinite-strength");
        push(!self.complete, "incomplete");
        push(self.permutation_symmetric, "permutation-symmetric");
        push(self.von_neumann, "von-neumann");
        out
    }
}

impl Measurement {
    /// A complete measurement; fails if ‖Σ Ω†Ω − I‖_F ≥ 1e-9.
    pub fn new(operators: Vec<ComplexMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = Self::unchecked(operators, labels)?;
        let report = m.validate();
        if !report.complete {
            return Err(Error::NotNormalized(report.defect));
        }
        Ok(m)
    }

    /// Shape checks only; use [`Measurement::validate`] to inspect completeness.
    pub fn unchecked(operators: Vec<ComplexMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let dim = operators.first().ok_or(Error::EmptyMeasurement)?.dim();
        if let Some(bad) = operators.iter().find(|o| o.dim() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        let labels = match labels {
            Some(l) if l.len() != operators.len() => {
                return Err(Error::LengthMismatch(l.len(), operators.len()))
            }
            Some(l) => l,
            None => (0..operators.len()).map(|i| format!("{i}")).collect(),
        };
        Ok(Self {
            dim,
            operators,
            labels,
        })
    }

    /// The trivial measurement {I}.
    pub fn identity(dim: usize) -> Self {
        Self::unchecked(alloc::vec![ComplexMatrix::identity(dim)], None).expect("nonempty")
    }

    /// Projective measurement onto the columns of `basis` (computational basis
    /// when `None`).
    pub fn projective(dim: usize, basis: Option<&ComplexMatrix>) -> Self {
        let ops = (0..dim)
            .map(|k| match basis {
                Some(u) => ComplexMatrix::projector(&u.column(k)),
                None => {
                    let mut d = alloc::vec![0.0; dim];
                    d[k] = 1.0;
                    ComplexMatrix::from_real_diag(&d)
                }
            })
            .collect();
        Self::unchecked(ops, None).expect("nonempty")
    }

    /// Two-outcome qubit measurement {diag(√(1−e), √e), diag(√e, √(1−e))},
    /// which acts on basis states as a binary symmetric channel.
    pub fn binary_symmetric(error: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&error) {
            return Err(Error::BadProbability(error));
        }
        let (a, b) = ((1.0 - error).sqrt(), error.sqrt());
        Self::new(
            alloc::vec![
                ComplexMatrix::from_real_diag(&[a, b]),
                ComplexMatrix::from_real_diag(&[b, a]),
            ],
            None,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let total = sum_matrices(self.dim, self.effects().iter().map(Effect::matrix));
        let defect = total.distance(&ComplexMatrix::identity(self.dim));
        ValidationReport {
            complete: defect < COMPLETENESS_TOL,
            defect,
        }
    }

    pub fn effects(&self) -> Vec<Effect> {
        self.operators
            .iter()
            .map(|o| Effect((&o.adjoint() * o).hermitian_part()))
            .collect()
    }

    fn check_state(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: rho.dim(),
            });
        }
        Ok(())
    }

    /// Outcome probabilities Tr[Ω_n†Ω_n ρ].
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        self.check_state(rho)?;
        Ok(self.effects().iter().map(|e| e.probability(rho)).collect())
    }

    /// Post-measurement state Ω_n ρ Ω_n† / p_n and its probability p_n.
    pub fn apply_outcome(&self, rho: &DensityOperator, n: usize) -> Result<(DensityOperator, f64)> {
        self.check_state(rho)?;
        let op = self.operators.get(n).ok_or(Error::OutcomeOutOfRange(n))?;
        let unnorm = op.sandwich(rho.matrix());
        let prob = unnorm.trace().re;
        if prob <= ZERO_PROB {
            return Err(Error::ZeroProbabilityOutcome { outcome: n, prob });
        }
        Ok((DensityOperator::from_hermitian_unchecked(unnorm.scale(1.0 / prob)), prob))
    }

    /// Unconditioned post-measurement state Σ_n Ω_n ρ Ω_n†.
    pub fn unconditional_map(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_state(rho)?;
        Ok(DensityOperator::from_hermitian_unchecked(self.channel(rho.matrix())))
    }

    /// Σ_n Ω_n X Ω_n† on an arbitrary matrix.
    pub fn channel(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let parts: Vec<ComplexMatrix> = self.operators.iter().map(|o| o.sandwich(x)).collect();
        sum_matrices(self.dim, &parts)
    }

    pub fn classify(&self, rho: Option<&DensityOperator>) -> ClassificationReport {
        let tol = CLASSIFY_TOL;
        let spectra: Vec<Option<Vec<f64>>> = self
            .operators
            .iter()
            .map(|o| {
                if o.hermitian_defect() > tol {
                    None
                } else {
                    eig_hermitian(o).ok().map(|(v, _)| v.values().to_vec())
                }
            })
            .collect();
        let bare = spectra
            .iter()
            .all(|s| s.as_ref().is_some_and(|v| v.iter().all(|&x| x >= -tol)));

        let commutative = self.pairwise_commuting(tol);

        let effect_spectra: Vec<Vec<f64>> = self
            .effects()
            .iter()
            .map(|e| clamped_spectrum(e.matrix()).unwrap_or_default())
            .collect();
        let complete = effect_spectra
            .iter()
            .all(|s| s.iter().filter(|&&x| x > tol).count() <= 1);
        let finite_strength = effect_spectra
            .iter()
            .all(|s| s.iter().all(|&x| x > tol));

        let von_neumann = commutative
            && self.operators.iter().zip(&spectra).all(|(o, s)| {
                s.as_ref().is_some_and(|v| v.iter().filter(|&&x| x > tol).count() == 1)
                    && (o * o).distance(o) <= tol
            });

        let permutation_symmetric = commutative && self.is_permutation_symmetric(tol);

        let classical_compatible = rho.map(|r| {
            bare && commutative
                && r.dim() == self.dim
                && self.operators.iter().all(|o| o.commutator_norm(r.matrix()) <= tol)
        });

        ClassificationReport {
            bare,
            classical_compatible,
            commutative,
            complete,
            finite_strength,
            permutation_symmetric,
            von_neumann,
        }
    }

    fn pairwise_commuting(&self, tol: f64) -> bool {
        let ops = &self.operators;
        (0..ops.len()).all(|a| ((a + 1)..ops.len()).all(|b| ops[a].commutator_norm(&ops[b]) <= tol))
    }

    fn is_permutation_symmetric(&self, tol: f64) -> bool {
        let Some(basis) = common_eigenbasis(&self.operators, tol) else {
            return false;
        };
        let diagonals: Vec<Vec<Complex64>> = self
            .operators
            .iter()
            .map(|o| (&(&basis.adjoint() * o) * &basis).diagonal())
            .collect();
        is_permutation_closed(&diagonals, |a, b| (a - b).norm() <= tol)
    }

    /// Polar split Ω_n = U_n Q_n: the bare measurement {Q_n} and the feedback
    /// unitaries {U_n}.
    pub fn polar_parts(&self) -> (Measurement, Vec<ComplexMatrix>) {
        let (unitaries, positives): (Vec<_>, Vec<_>) =
            self.operators.iter().map(polar_decompose).unzip();
        let bare = Self {
            dim: self.dim,
            operators: positives,
            labels: self.labels.clone(),
        };
        (bare, unitaries)
    }

    /// Outcome-conditioned feedback Ω_n → T_n Ω_n (unitary or permutation T_n).
    pub fn with_feedback(&self, feedback: &[ComplexMatrix]) -> Result<Self> {
        if feedback.len() != self.len() {
            return Err(Error::LengthMismatch(feedback.len(), self.len()));
        }
        for t in feedback {
            if t.dim() != self.dim {
                return Err(Error::DimMismatch {
                    expected: self.dim,
                    got: t.dim(),
                });
            }
            let d = t.unitarity_defect();
            if d > 1e-9 {
                return Err(Error::NotUnitary(d));
            }
        }
        Ok(Self {
            dim: self.dim,
            operators: feedback.iter().zip(&self.operators).map(|(t, o)| t * o).collect(),
            labels: self.labels.clone(),
        })
    }
}

/// Permutation matrix sending basis state |j⟩ to |perm[j]⟩.
pub fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let mut m = ComplexMatrix::zeros(n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// A unitary whose columns diagonalize every operator in `ops`, if one exists
/// (commuting normal operators). Found from the eigenvectors of a generic real
/// combination of the Hermitian and anti-Hermitian parts.
pub fn common_eigenbasis(ops: &[ComplexMatrix], tol: f64) -> Option<ComplexMatrix> {
    let dim = ops.first()?.dim();
    let half_i = Complex64::new(0.0, -0.5);
    let parts: Vec<ComplexMatrix> = ops
        .iter()
        .flat_map(|o| {
            let adj = o.adjoint();
            [(o + &adj).scale(0.5), (o - &adj).scale_complex(half_i)]
        })
        .collect();
    let scale = ops.iter().map(ComplexMatrix::frobenius_norm).fold(1.0, f64::max);
    for attempt in 0..4u64 {
        let mut rng = rng_for(0x5eed_0000 + attempt, 0);
        let mut h = ComplexMatrix::zeros(dim);
        for p in &parts {
            let c = 0.5 + crate::random::gaussian(&mut rng);
            h = &h + &p.scale(c);
        }
        let Ok((_, v)) = eig_hermitian(&h.hermitian_part()) else {
            continue;
        };
        let vd = v.adjoint();
        if ops
            .iter()
            .all(|o| (&(&vd * o) * &v).is_diagonal(tol * scale))
        {
            return Some(v);
        }
    }
    None
}

/// p M + (1 − p) N: operators √p Ω^M followed by √(1−p) Ω^N. A branch with
/// zero weight is dropped. Labels become "m:<label>" and "n:<label>".
pub fn mix(m: &Measurement, n: &Measurement, p: f64) -> Result<Measurement> {
    if m.dim != n.dim {
        return Err(Error::DimMismatch {
            expected: m.dim,
            got: n.dim,
        });
    }
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::BadProbability(p));
    }
    let mut operators = Vec::new();
    let mut labels = Vec::new();
    for (meas, weight, tag) in [(m, p, "m"), (n, 1.0 - p, "n")] {
        if weight == 0.0 {
            continue;
        }
        let s = weight.sqrt();
        for (op, label) in meas.operators.iter().zip(&meas.labels) {
            operators.push(op.scale(s));
            labels.push(format!("{tag}:{label}"));
        }
    }
    Measurement::unchecked(operators, Some(labels))
}

/// M followed by N: operators Ω^N_n Ω^M_m for every (m, n), labelled
/// "<m>*<n>" with m varying slowest.
pub fn concat(m: &Measurement, n: &Measurement) -> Result<Measurement> {
    if m.dim != n.dim {
        return Err(Error::DimMismatch {
            expected: m.dim,
            got: n.dim,
        });
    }
    let mut operators = Vec::with_capacity(m.len() * n.len());
    let mut labels = Vec::with_capacity(m.len() * n.len());
    for (om, lm) in m.operators.iter().zip(&m.labels) {
        for (on, ln) in n.operators.iter().zip(&n.labels) {
            operators.push(on * om);
            labels.push(format!("{lm}*{ln}"));
        }
    }
    Measurement::unchecked(operators, Some(labels))
}

/// Irreducible permutation-symmetric measurement: all N! coordinate
/// permutations of a diagonal generator with Tr[Ω²] = 1, scaled by
/// 1/√((N−1)!). Degenerate generators give repeated operators, which are kept.
pub fn ipm_from_generator(generator: &ComplexMatrix) -> Result<Measurement> {
    let n = generator.dim();
    if !generator.is_diagonal(1e-12) {
        return Err(Error::NotDiagonal);
    }
    let diag = generator.diagonal();
    if let Some(bad) = diag.iter().find(|z| z.im.abs() > 1e-12 || z.re < -1e-12) {
        return Err(Error::NotPositive(bad.re));
    }
    let omega: Vec<f64> = diag.iter().map(|z| z.re.max(0.0)).collect();
    let tr: f64 = omega.iter().map(|w| w * w).sum();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(tr));
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let alpha = 1.0 / fact.sqrt();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut operators = Vec::new();
    let mut labels = Vec::new();
    loop {
        let d: Vec<f64> = idx.iter().map(|&i| alpha * omega[i]).collect();
        operators.push(ComplexMatrix::from_real_diag(&d));
        labels.push(idx.iter().map(|i| format!("{i}")).collect::<Vec<_>>().join(""));
        if !next_permutation(&mut idx) {
            break;
        }
    }
    Measurement::new(operators, Some(labels))
}

/// Random K-outcome measurement: E_k = S^{-1/2} G_k S^{-1/2} with G_k = A_k A_k†
/// Ginibre and S = Σ G_k; Ω_k = √E_k (bare) or U_k √E_k with Haar U_k.
pub fn random_measurement(dim: usize, outcomes: usize, bare: bool, seed: u64) -> Result<Measurement> {
    const ATTEMPTS: usize = 10;
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if outcomes == 0 {
        return Err(Error::EmptyMeasurement);
    }
    let mut rng = rng_for(seed, 0);
    for _ in 0..ATTEMPTS {
        let gs: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let a = ginibre(dim, &mut rng);
                (&a * &a.adjoint()).hermitian_part()
            })
            .collect();
        let s = sum_matrices(dim, &gs);
        let (vals, _) = eig_hermitian(&s)?;
        let (hi, lo) = (vals.values()[0], vals.values()[dim - 1]);
        if !(lo > 1e-10 * hi) {
            continue;
        }
        let s_inv_half = hermitian_function(&s, |x| 1.0 / x.sqrt())?;
        let mut operators = Vec::with_capacity(outcomes);
        for g in &gs {
            let e = s_inv_half.sandwich(g).hermitian_part();
            let root = sqrt_psd(&e)?;
            operators.push(if bare {
                root
            } else {
                &haar_unitary_with(dim, &mut rng) * &root
            });
        }
        return Measurement::new(operators, None);
    }
    Err(Error::SingularNormalizer(ATTEMPTS))
}

/// K diagonal positive operators whose squares are the columns of a random
/// stochastic matrix: a classical measurement on basis states.
pub fn random_classical_measurement(dim: usize, outcomes: usize, seed: u64) -> Result<Measurement> {
    let mut rng = rng_for(seed, 0);
    let mut cols: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(outcomes); dim];
    for col in cols.iter_mut() {
        *col = crate::random::uniform_simplex(outcomes.max(1), &mut rng);
    }
    let ops = (0..outcomes.max(1))
        .map(|k| ComplexMatrix::from_real_diag(&cols.iter().map(|c| c[k].sqrt()).collect::<Vec<_>>()))
        .collect();
    Measurement::new(ops, None)
}

/// Commuting normal operators U diag(√e_k · phase) U† with a Haar basis U and
/// random phases, so neither bare nor diagonal in the computational basis.
pub fn random_commutative_measurement(dim: usize, outcomes: usize, seed: u64) -> Result<Measurement> {
    let classical = random_classical_measurement(dim, outcomes, seed)?;
    let mut rng = rng_for(seed, 1);
    let u = haar_unitary_with(dim, &mut rng);
    let ops = classical
        .operators()
        .iter()
        .map(|d| {
            let phased: Vec<Complex64> = d
                .real_diagonal()
                .iter()
                .map(|a| {
                    let t = core::f64::consts::TAU * rand::Rng::random::<f64>(&mut rng);
                    Complex64::from_polar(*a, t)
                })
                .collect();
            u.sandwich(&ComplexMatrix::from_diag(&phased))
        })
        .collect();
    Measurement::new(ops, None)
}

/// Diagonal IPM generator √E with E uniform on the simplex.
pub fn random_ipm_generator(dim: usize, seed: u64) -> ComplexMatrix {
    let e = crate::random::uniform_simplex(dim, &mut rng_for(seed, 0));
    ComplexMatrix::from_real_diag(&e.iter().map(|v| v.sqrt()).collect::<Vec<_>>())
}

/// Square-root ("pretty good") measurement for an ensemble:
/// E_i = ρ̄^{-1/2} p_i ρ_i ρ̄^{-1/2} on the support of ρ̄, Ω_i = √E_i. The
/// projector onto the kernel of ρ̄ is folded into the first outcome so the
/// result stays complete.
pub fn pretty_good_measurement(ensemble: &Ensemble) -> Result<Measurement> {
    let rho = ensemble.density();
    let dim = rho.dim();
    let (vals, vecs) = eig_hermitian(rho.matrix())?;
    let cutoff = 1e-12 * vals.values()[0].max(0.0);
    let inv_half: Vec<f64> = vals
        .values()
        .iter()
        .map(|&v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 })
        .collect();
    let kernel: Vec<f64> = vals.values().iter().map(|&v| if v > cutoff { 0.0 } else { 1.0 }).collect();
    let r = crate::linalg::reassemble(&vecs, &inv_half);
    let kernel_proj = crate::linalg::reassemble(&vecs, &kernel);
    let mut operators = Vec::with_capacity(ensemble.len());
    for (i, (p, state)) in ensemble.priors().values().iter().zip(ensemble.states()).enumerate() {
        let mut e = r.sandwich(&state.matrix().scale(*p)).hermitian_part();
        if i == 0 {
            e = &e + &kernel_proj;
        }
        operators.push(sqrt_psd(&e)?);
    }
    let m = Measurement::unchecked(operators, None)?;
    debug_assert_eq!(m.dim(), dim);
    Ok(m)
}
