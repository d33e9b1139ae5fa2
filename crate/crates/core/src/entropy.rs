//! Shannon, von Neumann and subentropy, all in nats.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::state::{DensityOperator, ProbVector, CLAMP_TOL, NORM_TOL};

/// −Σ p ln p with 0 ln 0 = 0.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    shannon_of(p.values())
}

/// Shannon entropy of raw weights; entries ≤ 0 contribute nothing.
pub fn shannon_of(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_of(rho.spectrum().values())
}

/// Entropy −Σ λ ln λ of the spectrum of a positive semidefinite matrix
/// (no trace condition).
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_of(&clamped_spectrum(m)?))
}

/// Eigenvalues with the small-negative clamp applied; more negative values fail.
pub fn clamped_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (vals, _) = eig_hermitian(m)?;
    vals.values()
        .iter()
        .map(|&v| {
            if v < -CLAMP_TOL {
                Err(Error::NotPositive(v))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// Σ_{k=2}^{N} 1/k
pub fn harmonic_tail(n: usize) -> f64 {
    (2..=n).map(|k| 1.0 / k as f64).sum()
}

/// Subentropy Q(E) of a positive unit-trace operator.
pub fn subentropy(e: &ComplexMatrix) -> Result<f64> {
    let tr = e.trace().re;
    if (tr - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(tr));
    }
    subentropy_of_spectrum(&clamped_spectrum(e)?)
}

/// Subentropy from eigenvalues:
/// Q = −Σ_k E_k ln E_k Π_{l≠k} E_k/(E_k − E_l), with the coincident-eigenvalue
/// limits taken exactly.
pub fn subentropy_of_spectrum(eigs: &[f64]) -> Result<f64> {
    if eigs.is_empty() {
        return Err(Error::UnsupportedDimension(0));
    }
    if let Some(&bad) = eigs.iter().find(|&&v| v < -CLAMP_TOL || !v.is_finite()) {
        return Err(Error::NotPositive(bad));
    }
    let total: f64 = eigs.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(total));
    }
    Ok(-divided_difference_pow_log(eigs))
}

/// (N−1)-th divided difference of g(x) = x^N ln x over the N given nodes
/// (repeats allowed, at least one node positive).
///
/// Split g = u·v with u = x^N and v = ln x and use the Leibniz rule
/// g[x_0..x_n] = Σ_r u[x_0..x_r] v[x_r..x_n] on nodes sorted ascending.
/// The polynomial factor is the complete homogeneous symmetric polynomial
/// h_{N−r}(x_0..x_r), a sum of nonnegative terms. For k ≥ 1,
/// ln[y_0..y_k] = (−1)^{k+1} ∫_0^∞ dt / Π_i (y_i + t), whose integrand is
/// positive, so nothing cancels catastrophically when nodes cluster.
/// Terms whose log factor would touch a zero node vanish in the limit and are
/// skipped.
pub(crate) fn divided_difference_pow_log(nodes: &[f64]) -> f64 {
    let big_n = nodes.len();
    let mut x: Vec<f64> = nodes.iter().map(|&v| v.max(0.0)).collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let zeros = x.iter().take_while(|&&v| v == 0.0).count();
    let n = big_n - 1;

    // h[r][m] = h_m(x_0, …, x_r)
    let mut h = vec![vec![0.0; big_n + 1]; big_n];
    for r in 0..big_n {
        h[r][0] = 1.0;
        for m in 1..=big_n {
            let prev = if r > 0 { h[r - 1][m] } else { 0.0 };
            h[r][m] = prev + x[r] * h[r][m - 1];
        }
    }

    let mut acc = 0.0;
    for r in zeros..=n {
        let poly = h[r][big_n - r];
        if poly == 0.0 {
            continue;
        }
        acc += poly * log_divided_difference(&x[r..]);
    }
    acc
}

/// ln[y_0..y_k] for positive nodes.
fn log_divided_difference(y: &[f64]) -> f64 {
    let k = y.len() - 1;
    if k == 0 {
        return y[0].ln();
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * reciprocal_product_integral(y)
}

/// ∫_0^∞ dt / Π_i (y_i + t) for positive y and at least two factors.
///
/// With t = e^s the integrand e^s / Π(y_i + e^s) is analytic in the strip
/// |Im s| < π and decays exponentially both ways, so the trapezoid rule
/// converges geometrically (error ~ exp(−2π²/h)). It is also unimodal with its
/// peak left of ln max(y), which makes outward stopping safe.
fn reciprocal_product_integral(y: &[f64]) -> f64 {
    const STEP: f64 = 0.4;
    const REL: f64 = 1e-19;
    let log_integrand = |s: f64| {
        let es = s.exp();
        s - y.iter().map(|&v| (v + es).ln()).sum::<f64>()
    };
    let ymax = y.iter().copied().fold(0.0, f64::max);
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let s0 = ymax.ln();
    let s_lo = ymin.ln();

    let mut sum = log_integrand(s0).exp();
    let mut j = 1usize;
    loop {
        let f = log_integrand(s0 + j as f64 * STEP).exp();
        sum += f;
        if f < REL * sum || j > 100_000 {
            break;
        }
        j += 1;
    }
    j = 1;
    loop {
        let s = s0 - j as f64 * STEP;
        let f = log_integrand(s).exp();
        sum += f;
        if (s < s_lo && f < REL * sum) || j > 100_000 {
            break;
        }
        j += 1;
    }
    sum * STEP
}
