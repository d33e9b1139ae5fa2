//! Seeded sampling: Gaussians, Haar unitaries, simplex points, permutations.
//!
//! Every generator is a ChaCha8 stream keyed by `(seed, stream)`, so work that
//! is split into chunks or trials draws from independent, reproducible
//! streams regardless of scheduling.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::linalg::{orthonormalize_columns, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal via Box–Muller.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Complex Gaussian with E|z|² = 1.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(gaussian(rng) * s, gaussian(rng) * s)
}

/// Ginibre matrix with i.i.d. complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal made
/// positive, done here by Gram–Schmidt on the columns.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    orthonormalize_columns(&ginibre(dim, rng))
}

pub fn haar_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(dim, &mut rng_for(seed, 0))
}

/// Haar-random unit vector.
pub fn haar_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = crate::linalg::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Full-rank state A A† / Tr[A A†] with A Ginibre (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> crate::state::DensityOperator {
    let a = ginibre(dim, rng);
    let aa = (&a * &a.adjoint()).hermitian_part();
    let tr = aa.trace().re;
    crate::state::DensityOperator::from_hermitian_unchecked(aa.scale(1.0 / tr))
}

/// Uniform point on the probability simplex (normalized exponentials).
pub fn uniform_simplex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Uniformly random permutation of 0..n (Fisher–Yates).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in 2..6 {
            let u = haar_unitary(n, 7);
            assert!(u.unitarity_defect() < 1e-12);
            assert_eq!(u, haar_unitary(n, 7));
            assert_ne!(u, haar_unitary(n, 8));
        }
    }

    #[test]
    fn streams_differ() {
        let a: f64 = rng_for(1, 0).random();
        let b: f64 = rng_for(1, 1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn simplex_and_permutation() {
        let mut rng = rng_for(3, 0);
        let p = uniform_simplex(5, &mut rng);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let mut perm = random_permutation(6, &mut rng);
        perm.sort_unstable();
        assert_eq!(perm, (0..6).collect::<Vec<_>>());
    }
}
