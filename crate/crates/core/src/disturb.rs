//! Output disturbance (entropy increase of the averaged state) and bounds on
//! input disturbance (capacity lost by passing states through the measurement).

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::encode::{conditional_outcome_dist, Ensemble};
use crate::entropy::{matrix_entropy, von_neumann_entropy};
use crate::error::Result;
use crate::infocap::{blahut_arimoto_from, optimize_state, BaConfig};
use crate::linalg::{eig_hermitian, norm, sum_matrices, ComplexMatrix};
use crate::measure::{common_eigenbasis, pretty_good_measurement, Measurement, CLASSIFY_TOL};
use crate::optimize::NelderMead;
use crate::random::{haar_ket, haar_unitary_with, rng_for};
use crate::state::{DensityOperator, ProbVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSemantics {
    Exact,
    HeuristicInterval,
}

impl IntervalSemantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::HeuristicInterval => "heuristic-interval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceInterval {
    pub lo: f64,
    pub hi: f64,
    pub semantics: IntervalSemantics,
    /// Set when the searched Holevo quantity exceeded ln N and `lo` was clamped.
    pub clamped: bool,
}

/// D_o(ρ) = S(Σ_n Ω_n ρ Ω_n†) − S(ρ).
pub fn d_output(m: &Measurement, rho: &DensityOperator) -> Result<f64> {
    let out = m.unconditional_map(rho)?;
    Ok(von_neumann_entropy(&out) - von_neumann_entropy(rho))
}

/// Smallest D_o found by multistart search (I/N is always a start), so an
/// upper bound on the infimum.
pub fn d_output_min(m: &Measurement, restarts: usize, seed: u64) -> Result<f64> {
    let (value, _) = optimize_state(m.dim(), restarts, seed, false, |rho| {
        d_output(m, rho).unwrap_or(f64::INFINITY)
    });
    Ok(value)
}

#[derive(Debug, Clone, Copy)]
pub struct InputConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Holevo search alphabet; `None` means 2N.
    pub alphabet: Option<usize>,
    pub max_evals: usize,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            alphabet: None,
            max_evals: 3000,
        }
    }
}

fn is_commutative(m: &Measurement) -> bool {
    let ops = m.operators();
    let commuting = (0..ops.len())
        .all(|a| ((a + 1)..ops.len()).all(|b| ops[a].commutator_norm(&ops[b]) <= CLASSIFY_TOL));
    commuting && common_eigenbasis(ops, CLASSIFY_TOL).is_some()
}

/// χ = S(Σ p Φ(ψ)) − Σ p S(Φ(ψ)) for pure inputs through the measurement channel.
fn holevo(m: &Measurement, prior: &[f64], kets: &[Vec<Complex64>]) -> f64 {
    let outputs: Vec<ComplexMatrix> = kets
        .iter()
        .map(|k| m.channel(&ComplexMatrix::projector(k)))
        .collect();
    let weighted: Vec<ComplexMatrix> = outputs.iter().zip(prior).map(|(o, p)| o.scale(*p)).collect();
    let avg = matrix_entropy(&sum_matrices(m.dim(), &weighted)).unwrap_or(0.0);
    let cond: f64 = outputs
        .iter()
        .zip(prior)
        .map(|(o, p)| p * matrix_entropy(o).unwrap_or(0.0))
        .sum();
    avg - cond
}

fn decode(dim: usize, size: usize, x: &[f64]) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let logits = &x[..size];
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    let prior = w.into_iter().map(|v| v / total).collect();
    let kets = x[size..]
        .chunks(2 * dim)
        .map(|c| {
            let v: Vec<Complex64> = c.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            let n = norm(&v).max(f64::MIN_POSITIVE);
            v.into_iter().map(|z| z / n).collect()
        })
        .collect();
    (prior, kets)
}

fn encode_params(prior: &[f64], kets: &[Vec<Complex64>]) -> Vec<f64> {
    prior
        .iter()
        .map(|p| p.max(1e-300).ln())
        .chain(kets.iter().flat_map(|k| k.iter().flat_map(|z| [z.re, z.im])))
        .collect()
}

/// Accessible information lower bound for a basis encoding: the pretty good
/// measurement on the channel outputs, with the prior then optimized for
/// that fixed decoder.
fn pgm_information(m: &Measurement, basis: &ComplexMatrix) -> Result<f64> {
    let dim = m.dim();
    let outputs = (0..dim)
        .map(|k| m.unconditional_map(&DensityOperator::pure(&basis.column(k))?))
        .collect::<Result<Vec<_>>>()?;
    let ens = Ensemble::new(ProbVector::uniform(dim), outputs)?;
    let decoder = pretty_good_measurement(&ens)?;
    let kernel = conditional_outcome_dist(&decoder, &ens)?;
    let sol = blahut_arimoto_from(&kernel, ProbVector::uniform(dim).values(), BaConfig::default());
    Ok(sol.value)
}

/// Bounds on D_i = ln N − C(Φ). Commutative measurements fix their
/// eigenbasis, so the interval is exactly (0, 0). Otherwise `hi` uses the best
/// basis encoding decoded by the pretty good measurement and `lo` the largest
/// Holevo quantity found.
pub fn d_input_bounds(m: &Measurement, config: InputConfig) -> Result<DisturbanceInterval> {
    if is_commutative(m) {
        return Ok(DisturbanceInterval {
            lo: 0.0,
            hi: 0.0,
            semantics: IntervalSemantics::Exact,
            clamped: false,
        });
    }
    let dim = m.dim();
    let ln_n = (dim as f64).ln();

    let mut bases = alloc::vec![ComplexMatrix::identity(dim)];
    for e in m.effects() {
        bases.push(eig_hermitian(e.matrix())?.1);
    }
    for r in 0..config.restarts {
        bases.push(haar_unitary_with(dim, &mut rng_for(config.seed, 1000 + r as u64)));
    }
    let mut best_pgm = 0.0f64;
    let mut best_basis = bases[0].clone();
    for b in &bases {
        let v = pgm_information(m, b)?;
        if v > best_pgm {
            best_pgm = v;
            best_basis = b.clone();
        }
    }

    let size = config.alphabet.unwrap_or(2 * dim).max(1);
    let basis_kets: Vec<Vec<Complex64>> = (0..dim).map(|k| best_basis.column(k)).collect();
    let mut chi_star = holevo(m, &ProbVector::uniform(dim).into_inner(), &basis_kets);
    let nm = NelderMead {
        max_evals: config.max_evals,
        ftol: 1e-13,
        step: 0.3,
    };
    for r in 0..config.restarts.max(1) {
        let mut rng = rng_for(config.seed, r as u64);
        let mut kets: Vec<Vec<Complex64>> = if r == 0 { basis_kets.clone() } else { Vec::new() };
        kets.truncate(size);
        while kets.len() < size {
            kets.push(haar_ket(dim, &mut rng));
        }
        let x0 = encode_params(&ProbVector::uniform(size).into_inner(), &kets);
        let found = nm.minimize(&x0, |x| {
            let (p, k) = decode(dim, size, x);
            -holevo(m, &p, &k)
        });
        chi_star = chi_star.max(-found.value);
    }

    let hi = (ln_n - best_pgm).max(0.0);
    let clamped = chi_star > ln_n + 1e-9;
    let lo = (ln_n - chi_star).max(0.0).min(hi);
    Ok(DisturbanceInterval {
        lo,
        hi,
        semantics: if (hi - lo).abs() < 1e-9 {
            IntervalSemantics::Exact
        } else {
            IntervalSemantics::HeuristicInterval
        },
        clamped,
    })
}
