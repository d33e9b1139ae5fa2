//! Unitarily covariant measurements, handled through their generating
//! effects: Monte Carlo information estimates over Haar unitaries and the
//! simplex integral behind the subentropy formula.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::encode::Ensemble;
use crate::error::{Error, Result};
use crate::entropy::{matrix_entropy, von_neumann_entropy};
use crate::linalg::{eig_hermitian, sqrt_psd, ComplexMatrix};
use crate::random::rng_for;
use crate::state::{DensityOperator, ProbVector, SpectrumVector};

pub use crate::random::haar_unitary;

/// Samples per Monte Carlo chunk. Chunk `c` draws from stream `c` of the seed,
/// so serial and parallel runs see the same samples.
pub const CHUNK: usize = 4096;

/// A covariant measurement given by weighted generator effects E_n (unit trace).
#[derive(Debug, Clone, PartialEq)]
pub struct UcmSpec {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    weights: ProbVector,
}

impl UcmSpec {
    pub fn new(components: Vec<(ComplexMatrix, f64)>) -> Result<Self> {
        let dim = components.first().ok_or(Error::EmptyMeasurement)?.0.dim();
        let (effects, weights): (Vec<_>, Vec<_>) = components.into_iter().unzip();
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
            let h = e.hermitian_defect();
            if h > 1e-10 {
                return Err(Error::NotHermitian(h));
            }
            let (vals, _) = eig_hermitian(e)?;
            let min = vals.values()[dim - 1];
            if min < -1e-10 {
                return Err(Error::NotPositive(min));
            }
            let tr = e.trace().re;
            if (tr - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(tr));
            }
        }
        Ok(Self {
            dim,
            effects: effects.iter().map(ComplexMatrix::hermitian_part).collect(),
            weights: ProbVector::new(weights)?,
        })
    }

    /// Single generator E.
    pub fn single(effect: ComplexMatrix) -> Result<Self> {
        Self::new(alloc::vec![(effect, 1.0)])
    }

    /// Generator diag(e) for a probability spectrum.
    pub fn diagonal(spectrum: &[f64]) -> Result<Self> {
        Self::single(ComplexMatrix::from_real_diag(spectrum))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn weights(&self) -> &ProbVector {
        &self.weights
    }
}

/// Running mean and variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let wa = self.count as f64 / n;
        let wb = other.count as f64 / n;
        Self {
            count: self.count + other.count,
            mean: self.mean * wa + other.mean * wb,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * wb,
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m2 / (n - 1.0) / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl From<Welford> for McEstimate {
    fn from(w: Welford) -> Self {
        Self {
            estimate: w.mean,
            stderr: w.stderr(),
            samples: w.count,
        }
    }
}

fn x_ln_x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Validated inputs for the information integrand.
#[derive(Debug, Clone)]
pub struct UcmInfoProblem {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    priors: Vec<f64>,
    kets: Vec<Vec<Complex64>>,
}

impl UcmInfoProblem {
    pub fn new(spec: &UcmSpec, ensemble: &Ensemble) -> Result<Self> {
        if spec.dim != ensemble.dim() {
            return Err(Error::DimMismatch {
                expected: spec.dim,
                got: ensemble.dim(),
            });
        }
        if !ensemble.is_pure() {
            return Err(Error::NotPure);
        }
        Ok(Self {
            dim: spec.dim,
            effects: spec.effects.clone(),
            weights: spec.weights.values().to_vec(),
            priors: ensemble.priors().values().to_vec(),
            kets: ensemble.states().iter().map(|s| s.principal_ket()).collect(),
        })
    }

    /// Integrand at one unitary: Σ_n [−q_n ln q_n + f_n(e_0) ln f_n(e_0)] with
    /// f_n(ψ) = N p_n ⟨ψ|U E_n U†|ψ⟩ and q_n = Σ_i P(i) f_n(ψ_i). The
    /// conditional term is the same for every pure state, so the first basis
    /// vector stands in for all of them.
    pub fn integrand(&self, u: &ComplexMatrix) -> f64 {
        let n = self.dim as f64;
        let ud = u.adjoint();
        let rotated: Vec<Vec<Complex64>> = self.kets.iter().map(|k| ud.apply(k)).collect();
        let reference = ud.column(0);
        let mut total = 0.0;
        for (e, p) in self.effects.iter().zip(&self.weights) {
            if *p == 0.0 {
                continue;
            }
            let q: f64 = self
                .priors
                .iter()
                .zip(&rotated)
                .map(|(pi, w)| pi * n * p * e.expectation(w))
                .sum();
            let f_ref = n * p * e.expectation(&reference);
            total += -x_ln_x(q) + x_ln_x(f_ref);
        }
        total
    }

    /// Accumulates `count` samples from stream `chunk` of `seed`.
    pub fn chunk(&self, seed: u64, chunk: u64, count: usize) -> Welford {
        let mut rng = rng_for(seed, chunk);
        let mut acc = Welford::default();
        for _ in 0..count {
            let u = crate::random::haar_unitary_with(self.dim, &mut rng);
            acc.push(self.integrand(&u));
        }
        acc
    }
}

/// Final-state information S(ρ) − E_U Σ_n w_n S(ρ_{U,n}) for the bare
/// covariant measurement with operators U √E_n U†, where
/// w_n = N p_n Tr[U E_n U† ρ].
#[derive(Debug, Clone)]
pub struct UcmFinalProblem {
    roots: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    rho: DensityOperator,
    entropy: f64,
}

impl UcmFinalProblem {
    pub fn new(spec: &UcmSpec, rho: &DensityOperator) -> Result<Self> {
        if spec.dim != rho.dim() {
            return Err(Error::DimMismatch {
                expected: spec.dim,
                got: rho.dim(),
            });
        }
        Ok(Self {
            roots: spec.effects.iter().map(sqrt_psd).collect::<Result<Vec<_>>>()?,
            weights: spec.weights.values().to_vec(),
            rho: rho.clone(),
            entropy: von_neumann_entropy(rho),
        })
    }

    pub fn integrand(&self, u: &ComplexMatrix) -> f64 {
        let n = self.rho.dim() as f64;
        let mut avg = 0.0;
        for (root, p) in self.roots.iter().zip(&self.weights) {
            let omega = u.sandwich(root);
            let post = omega.sandwich(self.rho.matrix());
            let tr = post.trace().re;
            if tr <= 1e-300 {
                continue;
            }
            avg += n * p * tr * matrix_entropy(&post.scale(1.0 / tr)).unwrap_or(0.0);
        }
        self.entropy - avg
    }

    pub fn chunk(&self, seed: u64, chunk: u64, count: usize) -> Welford {
        let mut rng = rng_for(seed, chunk);
        let mut acc = Welford::default();
        for _ in 0..count {
            let u = crate::random::haar_unitary_with(self.rho.dim(), &mut rng);
            acc.push(self.integrand(&u));
        }
        acc
    }
}

/// Chunk sizes covering `samples` in order.
pub fn chunk_plan(samples: usize) -> Vec<usize> {
    let mut out = alloc::vec![CHUNK; samples / CHUNK];
    if !samples.is_multiple_of(CHUNK) {
        out.push(samples % CHUNK);
    }
    out
}

/// Monte Carlo estimate of the information gained about a pure-state ensemble
/// by a covariant measurement. Both entropy terms share each Haar sample.
pub fn mc_info_ucm(spec: &UcmSpec, ensemble: &Ensemble, samples: usize, seed: u64) -> Result<McEstimate> {
    let problem = UcmInfoProblem::new(spec, ensemble)?;
    let acc = chunk_plan(samples)
        .iter()
        .enumerate()
        .map(|(c, &count)| problem.chunk(seed, c as u64, count))
        .fold(Welford::default(), |a, b| a.merge(&b));
    Ok(acc.into())
}

/// Serial Monte Carlo estimate of the final-state information.
pub fn mc_info_final_ucm(spec: &UcmSpec, rho: &DensityOperator, samples: usize, seed: u64) -> Result<McEstimate> {
    let problem = UcmFinalProblem::new(spec, rho)?;
    let acc = chunk_plan(samples)
        .iter()
        .enumerate()
        .map(|(c, &count)| problem.chunk(seed, c as u64, count))
        .fold(Welford::default(), |a, b| a.merge(&b));
    Ok(acc.into())
}

/// Gauss–Legendre nodes and weights on [0, 1], by Newton iteration on P_n.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// N·H for a covariant measurement with generator spectrum E, namely
/// −N! ∫ z ln z dP over the uniform simplex with z = Σ_k E_k P_k, by
/// Gauss–Legendre quadrature with `order` nodes per axis (N = 2 or 3).
pub fn simplex_entropy_integral(spectrum: &SpectrumVector, order: usize) -> Result<f64> {
    let e = spectrum.values();
    let (x, w) = gauss_legendre(order.max(1));
    let g = |z: f64| x_ln_x(z);
    match e.len() {
        2 => {
            let s: f64 = x.iter().zip(&w).map(|(t, wt)| wt * g(e[0] * t + e[1] * (1.0 - t))).sum();
            Ok(-2.0 * s)
        }
        3 => {
            let mut s = 0.0;
            for (a, wa) in x.iter().zip(&w) {
                let span = 1.0 - a;
                let inner_sum: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(t, wt)| {
                        let b = span * t;
                        wt * g(e[0] * a + e[1] * b + e[2] * (span - b))
                    })
                    .sum();
                s += wa * span * inner_sum;
            }
            Ok(-6.0 * s)
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Rows and columns of |U_ij|² each sum to one.
pub fn doubly_stochastic_defect(u: &ComplexMatrix) -> f64 {
    let n = u.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| u[(i, j)].norm_sqr()).sum();
        let col: f64 = (0..n).map(|j| u[(j, i)].norm_sqr()).sum();
        worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
    }
    worst
}
