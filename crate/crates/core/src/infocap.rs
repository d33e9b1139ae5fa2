//! Information gain, measurement strength and the capacities built on them.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::covariant::UcmSpec;
use crate::encode::{conditional_outcome_dist, Ensemble, Kernel};
use crate::entropy::{harmonic_tail, matrix_entropy, shannon_of, subentropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{norm, ComplexMatrix};
use crate::measure::{common_eigenbasis, Measurement, CLASSIFY_TOL, ZERO_PROB};
use crate::optimize::NelderMead;
use crate::random::{haar_ket, haar_unitary_with, rng_for, uniform_simplex};
use crate::state::{DensityOperator, ProbVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Exact,
    LowerBound,
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedFormPs,
    ClosedFormUcm,
    BlahutArimoto,
    HeuristicSearch,
    MonteCarlo,
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::LowerBound => "lower-bound",
            Self::Estimate => "estimate",
        }
    }
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedFormPs => "closed-form-ps",
            Self::ClosedFormUcm => "closed-form-ucm",
            Self::BlahutArimoto => "blahut-arimoto",
            Self::HeuristicSearch => "heuristic-search",
            Self::MonteCarlo => "monte-carlo",
        }
    }
}

/// A capacity value in nats with how much to trust it.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value: f64,
    pub semantics: Semantics,
    pub stderr: f64,
    pub method: Method,
    pub achieving_encoding: Option<Ensemble>,
}

impl CapacityResult {
    fn exact(value: f64, method: Method, encoding: Option<Ensemble>) -> Self {
        Self {
            value,
            semantics: Semantics::Exact,
            stderr: 0.0,
            method,
            achieving_encoding: encoding,
        }
    }
}

fn check_dims(m: &Measurement, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimMismatch {
            expected: m.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// Mutual information Σ_i Σ_j P(i) Q(j|i) ln(Q(j|i)/Q(j)).
pub fn mutual_information(prior: &[f64], kernel: &Kernel) -> f64 {
    let q = kernel.output_distribution(prior);
    let mut total = 0.0;
    for (p, row) in prior.iter().zip(kernel.rows()) {
        if *p <= 0.0 {
            continue;
        }
        for (w, qj) in row.iter().zip(&q) {
            if *w > 0.0 && *qj > ZERO_PROB {
                total += p * w * (w / qj).ln();
            }
        }
    }
    total
}

/// ΔI_i = H[P(i)] − Σ_j Q(j) H[P(i|j)].
pub fn info_initial(m: &Measurement, ens: &Ensemble) -> Result<f64> {
    let kernel = conditional_outcome_dist(m, ens)?;
    let prior = ens.priors().values();
    let q = kernel.output_distribution(prior);
    let mut avg = 0.0;
    for (j, qj) in q.iter().enumerate() {
        if *qj <= ZERO_PROB {
            continue;
        }
        let post: Vec<f64> = prior.iter().enumerate().map(|(i, p)| kernel.q(j, i) * p / qj).collect();
        avg += qj * shannon_of(&post);
    }
    Ok(shannon_of(prior) - avg)
}

/// The same quantity as H[Q(j)] − Σ_i P(i) H[Q(j|i)].
pub fn info_initial_reverse(m: &Measurement, ens: &Ensemble) -> Result<f64> {
    let kernel = conditional_outcome_dist(m, ens)?;
    let prior = ens.priors().values();
    let noise: f64 = prior.iter().zip(kernel.rows()).map(|(p, row)| p * shannon_of(row)).sum();
    Ok(shannon_of(&kernel.output_distribution(prior)) - noise)
}

/// ΔI_f = S(ρ) − Σ_n p_n S(ρ_n).
pub fn info_final(m: &Measurement, rho: &DensityOperator) -> Result<f64> {
    check_dims(m, rho.dim())?;
    let mut avg = 0.0;
    for op in m.operators() {
        let unnorm = op.sandwich(rho.matrix());
        let p = unnorm.trace().re;
        if p <= ZERO_PROB {
            continue;
        }
        avg += p * matrix_entropy(&unnorm.scale(1.0 / p))?;
    }
    Ok(von_neumann_entropy(rho) - avg)
}

/// K_I = ln N − Σ_n P_n S(Ẽ_n) with P_n = Tr E_n / N and Ẽ_n = E_n / Tr E_n.
pub fn measurement_strength(m: &Measurement) -> Result<f64> {
    let n = m.dim() as f64;
    let mut avg = 0.0;
    for e in m.effects() {
        let tr = e.matrix().trace().re;
        if tr <= ZERO_PROB {
            continue;
        }
        avg += tr / n * matrix_entropy(&e.matrix().scale(1.0 / tr))?;
    }
    Ok(n.ln() - avg)
}

/// ρ = A A† / Tr[A A†] from 2N² real parameters.
fn state_from_params(dim: usize, x: &[f64]) -> DensityOperator {
    let a = ComplexMatrix::from_fn(dim, |i, j| {
        let k = 2 * (i * dim + j);
        Complex64::new(x[k], x[k + 1])
    });
    let aa = &a * &a.adjoint();
    let tr = aa.trace().re.max(f64::MIN_POSITIVE);
    DensityOperator::from_hermitian_unchecked(aa.scale(1.0 / tr))
}

fn params_from_factor(a: &ComplexMatrix) -> Vec<f64> {
    a.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Multistart search over states; starts are I/N followed by `restarts`
/// states U diag(√λ) with Haar U and uniform λ. Returns the best value and state.
pub(crate) fn optimize_state(
    dim: usize,
    restarts: usize,
    seed: u64,
    maximize: bool,
    objective: impl Fn(&DensityOperator) -> f64,
) -> (f64, DensityOperator) {
    let sign = if maximize { -1.0 } else { 1.0 };
    let nm = NelderMead {
        max_evals: 400 * dim * dim,
        ftol: 1e-13,
        step: 0.3,
    };
    let mut starts = alloc::vec![ComplexMatrix::identity(dim)];
    for r in 0..restarts {
        let mut rng = rng_for(seed, r as u64 + 1);
        let u = haar_unitary_with(dim, &mut rng);
        let lam: Vec<f64> = uniform_simplex(dim, &mut rng).iter().map(|v| v.sqrt()).collect();
        starts.push(&u * &ComplexMatrix::from_real_diag(&lam));
    }
    let mut best: Option<(f64, DensityOperator)> = None;
    for a in &starts {
        let x0 = params_from_factor(a);
        let start_state = state_from_params(dim, &x0);
        let start_value = objective(&start_state);
        let found = nm.minimize(&x0, |x| sign * objective(&state_from_params(dim, x)));
        let (v, s) = if sign * start_value <= found.value {
            (start_value, start_state)
        } else {
            (sign * found.value, state_from_params(dim, &found.x))
        };
        let better = match &best {
            None => true,
            Some((bv, _)) => sign * v < sign * *bv,
        };
        if better {
            best = Some((v, s));
        }
    }
    best.expect("at least one start")
}

/// K = sup_ρ ΔI_f(M, ρ) by multistart Nelder–Mead; always a lower bound.
pub fn purification_capacity(m: &Measurement, restarts: usize, seed: u64) -> Result<CapacityResult> {
    let (value, state) = optimize_state(m.dim(), restarts, seed, true, |rho| {
        info_final(m, rho).unwrap_or(f64::NEG_INFINITY)
    });
    Ok(CapacityResult {
        value,
        semantics: Semantics::LowerBound,
        stderr: 0.0,
        method: Method::HeuristicSearch,
        achieving_encoding: Some(Ensemble::new(ProbVector::uniform(1), alloc::vec![state])?),
    })
}

/// Blahut–Arimoto settings.
#[derive(Debug, Clone, Copy)]
pub struct BaConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BaConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Outcome of a Blahut–Arimoto run over the inputs of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BaSolution {
    /// Lower capacity bound ln Σ_i p_i e^{D_i}.
    pub value: f64,
    /// Upper capacity bound max_i D_i.
    pub upper: f64,
    pub prior: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Capacity of a classical kernel from a starting prior; inputs with zero
/// starting weight stay at zero. Stops once max_i D_i − ln Σ p_i e^{D_i} < tol.
pub fn blahut_arimoto_from(kernel: &Kernel, start: &[f64], config: BaConfig) -> BaSolution {
    let rows = kernel.rows();
    let mut p: Vec<f64> = start.to_vec();
    let mut d = alloc::vec![0.0; rows.len()];
    let mut iterations = 0;
    loop {
        let q = kernel.output_distribution(&p);
        for ((di, row), pi) in d.iter_mut().zip(rows).zip(&p) {
            *di = if *pi > 0.0 {
                row.iter()
                    .zip(&q)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, qj)| w * (w / qj).ln())
                    .sum()
            } else {
                f64::NEG_INFINITY
            };
        }
        let dmax = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = p.iter().zip(&d).filter(|(pi, _)| **pi > 0.0).map(|(pi, di)| pi * (di - dmax).exp()).sum();
        let lower = dmax + z.ln();
        let converged = dmax - lower < config.tol;
        if converged || iterations >= config.max_iter {
            return BaSolution {
                value: lower.max(0.0),
                upper: dmax.max(0.0),
                prior: p,
                iterations,
                converged,
            };
        }
        for (pi, di) in p.iter_mut().zip(&d) {
            if *pi > 0.0 {
                *pi *= (di - dmax).exp() / z;
            }
        }
        iterations += 1;
    }
}

/// Channel capacity of a kernel from the uniform prior. Reported exact when
/// the bounds close within `tol`, as a lower bound otherwise. The encoding
/// holds the optimal prior over classical input letters.
pub fn blahut_arimoto(kernel: &Kernel, config: BaConfig) -> Result<CapacityResult> {
    let sol = blahut_arimoto_from(kernel, &ProbVector::uniform(kernel.inputs()).into_inner(), config);
    Ok(ba_result(&sol, Ensemble::diagonal(&ProbVector::from_weights(sol.prior.clone())?)))
}

fn ba_result(sol: &BaSolution, encoding: Ensemble) -> CapacityResult {
    CapacityResult {
        value: sol.value,
        semantics: if sol.converged {
            Semantics::Exact
        } else {
            Semantics::LowerBound
        },
        stderr: 0.0,
        method: Method::BlahutArimoto,
        achieving_encoding: Some(encoding),
    }
}

/// Kernel Q(j|ψ_i) = ⟨ψ_i|E_j|ψ_i⟩ for pure input kets.
pub fn pure_kernel(m: &Measurement, kets: &[Vec<Complex64>]) -> Result<Kernel> {
    let effects = m.effects();
    let rows = kets
        .iter()
        .map(|k| {
            let raw: Vec<f64> = effects.iter().map(|e| e.matrix().expectation(k).max(0.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / total).collect()
        })
        .collect();
    Kernel::new(rows)
}

/// C for a commutative measurement: Blahut–Arimoto on the kernel of its
/// common eigenbasis.
pub fn capacity_commutative(m: &Measurement) -> Result<CapacityResult> {
    capacity_commutative_with(m, BaConfig::default())
}

pub fn capacity_commutative_with(m: &Measurement, config: BaConfig) -> Result<CapacityResult> {
    let ops = m.operators();
    let commuting = (0..ops.len()).all(|a| ((a + 1)..ops.len()).all(|b| ops[a].commutator_norm(&ops[b]) <= CLASSIFY_TOL));
    if !commuting {
        return Err(Error::NotCommutative);
    }
    let basis = common_eigenbasis(ops, CLASSIFY_TOL).ok_or(Error::NotCommutative)?;
    let kets: Vec<Vec<Complex64>> = (0..m.dim()).map(|k| basis.column(k)).collect();
    let kernel = pure_kernel(m, &kets)?;
    let sol = blahut_arimoto_from(&kernel, &ProbVector::uniform(m.dim()).into_inner(), config);
    let states = kets
        .iter()
        .map(|k| DensityOperator::pure(k))
        .collect::<Result<Vec<_>>>()?;
    let encoding = Ensemble::new(ProbVector::from_weights(sol.prior.clone())?, states)?;
    Ok(ba_result(&sol, encoding))
}

/// C = ln N − Σ_n p_n S(E_n) for a permutation-symmetric measurement built
/// from diagonal unit-trace generators E_n with weights p_n.
pub fn capacity_ps(generators: &[(ComplexMatrix, f64)]) -> Result<CapacityResult> {
    let dim = generators.first().ok_or(Error::EmptyMeasurement)?.0.dim();
    let weights = ProbVector::new(generators.iter().map(|g| g.1).collect())?;
    let mut avg = 0.0;
    for ((e, _), p) in generators.iter().zip(weights.values()) {
        if e.dim() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: e.dim(),
            });
        }
        if !e.is_diagonal(1e-12) {
            return Err(Error::NotDiagonal);
        }
        let diag = e.real_diagonal();
        let tr: f64 = diag.iter().sum();
        if (tr - 1.0).abs() > 1e-10 || diag.iter().any(|v| *v < -1e-12) {
            return Err(Error::NotNormalized(tr));
        }
        avg += p * shannon_of(&diag);
    }
    Ok(CapacityResult::exact(
        (dim as f64).ln() - avg,
        Method::ClosedFormPs,
        Some(Ensemble::uniform_basis(dim, None)?),
    ))
}

/// C = ln N − Σ_n p_n Q(E_n) − Σ_{k=2}^N 1/k for a covariant measurement.
pub fn capacity_ucm(spec: &UcmSpec) -> Result<CapacityResult> {
    let dim = spec.dim();
    let mut avg = 0.0;
    for (e, p) in spec.effects().iter().zip(spec.weights().values()) {
        avg += p * subentropy(e)?;
    }
    Ok(CapacityResult::exact(
        (dim as f64).ln() - avg - harmonic_tail(dim),
        Method::ClosedFormUcm,
        Some(Ensemble::uniform_basis(dim, None)?),
    ))
}

/// Settings for the pure-state alphabet search.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Alphabet size; `None` means 2N.
    pub alphabet: Option<usize>,
    pub restarts: usize,
    pub rounds: usize,
    pub seed: u64,
    pub evals_per_state: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            alphabet: None,
            restarts: 8,
            rounds: 4,
            seed: 0,
            evals_per_state: 300,
        }
    }
}

fn ket_params(k: &[Complex64]) -> Vec<f64> {
    k.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn ket_from_params(x: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let n = norm(&v).max(f64::MIN_POSITIVE);
    v.into_iter().map(|z| z / n).collect()
}

fn basis_kets(dim: usize) -> Vec<Vec<Complex64>> {
    (0..dim)
        .map(|k| {
            let mut v = alloc::vec![Complex64::new(0.0, 0.0); dim];
            v[k] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Lower bound on C(M) over ensembles of pure states: Blahut–Arimoto over the
/// alphabet alternating with Nelder–Mead refinement of each state. The first
/// start holds the computational basis and the effects' eigenvectors.
pub fn capacity_search(m: &Measurement, config: SearchConfig) -> Result<CapacityResult> {
    let dim = m.dim();
    let size = config.alphabet.unwrap_or(2 * dim).max(1);
    let inner_ba = BaConfig {
        tol: 1e-11,
        max_iter: 20_000,
    };
    let mut eigvecs = Vec::new();
    for e in m.effects() {
        let (_, v) = crate::linalg::eig_hermitian(e.matrix())?;
        for k in 0..dim {
            eigvecs.push(v.column(k));
        }
    }
    let mut best: Option<(BaSolution, Vec<Vec<Complex64>>)> = None;
    for r in 0..config.restarts.max(1) {
        let mut rng = rng_for(config.seed, r as u64);
        let mut kets: Vec<Vec<Complex64>> = match r {
            0 => basis_kets(dim).into_iter().chain(eigvecs.iter().cloned()).take(size).collect(),
            1 => eigvecs.iter().take(size).cloned().collect(),
            _ => Vec::new(),
        };
        while kets.len() < size {
            kets.push(haar_ket(dim, &mut rng));
        }
        let uniform = ProbVector::uniform(size).into_inner();
        let mut sol = blahut_arimoto_from(&pure_kernel(m, &kets)?, &uniform, inner_ba);
        for _ in 0..config.rounds {
            let before = sol.value;
            for k in 0..size {
                let nm = NelderMead {
                    max_evals: config.evals_per_state,
                    ftol: 1e-14,
                    step: 0.15,
                };
                let prior = sol.prior.clone();
                let mut trial = kets.clone();
                let found = nm.minimize(&ket_params(&kets[k]), |x| {
                    trial[k] = ket_from_params(x);
                    match pure_kernel(m, &trial) {
                        Ok(kernel) => -mutual_information(&prior, &kernel),
                        Err(_) => f64::INFINITY,
                    }
                });
                let current = mutual_information(&prior, &pure_kernel(m, &kets)?);
                if -found.value > current {
                    kets[k] = ket_from_params(&found.x);
                }
            }
            let start: Vec<f64> = sol.prior.iter().map(|p| 0.5 * p + 0.5 / size as f64).collect();
            let next = blahut_arimoto_from(&pure_kernel(m, &kets)?, &start, inner_ba);
            if next.value >= sol.value {
                sol = next;
            }
            if sol.value - before < 1e-10 {
                break;
            }
        }
        let better = best.as_ref().is_none_or(|(b, _)| sol.value > b.value);
        if better {
            best = Some((sol, kets));
        }
    }
    let (sol, kets) = best.expect("at least one restart");
    let states = kets.iter().map(|k| DensityOperator::pure(k)).collect::<Result<Vec<_>>>()?;
    Ok(CapacityResult {
        value: sol.value,
        semantics: Semantics::LowerBound,
        stderr: 0.0,
        method: Method::HeuristicSearch,
        achieving_encoding: Some(Ensemble::new(ProbVector::from_weights(sol.prior)?, states)?),
    })
}

/// C(M): exact for commutative measurements, a searched lower bound otherwise.
pub fn capacity_general(m: &Measurement, config: SearchConfig) -> Result<CapacityResult> {
    match capacity_commutative(m) {
        Err(Error::NotCommutative) => capacity_search(m, config),
        other => other,
    }
}
