//! Majorization, Chong matrices and random majorization pairs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::random::{random_permutation, rng_for, uniform_simplex};
use crate::state::{SpectrumVector, NORM_TOL};

const PARTIAL_SUM_TOL: f64 = 1e-12;
const CHONG_TOL: f64 = 1e-12;

/// x ≺ y: every descending partial sum of x is at most that of y.
pub fn is_majorized_by(x: &SpectrumVector, y: &SpectrumVector) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    for v in [x, y] {
        if (v.sum() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(v.sum()));
        }
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (a, b) in x.values().iter().zip(y.values()) {
        sx += a;
        sy += b;
        if sx > sy + PARTIAL_SUM_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when the multiset of rows is mapped onto itself by every permutation
/// of coordinates. Checking the adjacent transpositions suffices since they
/// generate the symmetric group.
pub fn is_permutation_closed<T: Clone>(rows: &[Vec<T>], close: impl Fn(&T, &T) -> bool) -> bool {
    let Some(width) = rows.first().map(Vec::len) else {
        return true;
    };
    if rows.iter().any(|r| r.len() != width) {
        return false;
    }
    for i in 0..width.saturating_sub(1) {
        let mut used = alloc::vec![false; rows.len()];
        for row in rows {
            let mut swapped = row.clone();
            swapped.swap(i, i + 1);
            let hit = rows.iter().enumerate().position(|(k, cand)| {
                !used[k] && cand.iter().zip(&swapped).all(|(a, b)| close(a, b))
            });
            match hit {
                Some(k) => used[k] = true,
                None => return false,
            }
        }
    }
    true
}

/// Nonnegative matrix whose row multiset is closed under permutations.
pub fn is_chong_matrix(rows: &[Vec<f64>]) -> bool {
    if rows.iter().flatten().any(|&v| v < 0.0 || !v.is_finite()) {
        return false;
    }
    is_permutation_closed(rows, |a, b| (a - b).abs() <= CHONG_TOL)
}

/// All distinct orderings of `row` stacked as rows (the permutation orbit),
/// divided by `scale`.
pub fn permutation_orbit(row: &[f64], scale: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..row.len()).collect();
    loop {
        out.push(idx.iter().map(|&i| row[i] / scale).collect());
        if !next_permutation(&mut idx) {
            break;
        }
    }
    out
}

/// Lexicographic successor; false once the last permutation is reached.
pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A·v for a row-major matrix.
pub fn mat_vec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Convex combination Σ_k w_k P_{π_k} of permutation matrices as a dense
/// doubly stochastic matrix.
pub fn doubly_stochastic(perms: &[Vec<usize>], weights: &[f64]) -> Vec<Vec<f64>> {
    let n = perms.first().map_or(0, Vec::len);
    let mut b = alloc::vec![alloc::vec![0.0; n]; n];
    for (perm, &w) in perms.iter().zip(weights) {
        for (i, &j) in perm.iter().enumerate() {
            b[i][j] += w;
        }
    }
    b
}

/// Random pair x ≺ y: y uniform on the simplex, x = B y with B a random
/// convex mixture of N permutation matrices.
pub fn random_majorization_pair(n: usize, seed: u64) -> Result<(SpectrumVector, SpectrumVector)> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut rng = rng_for(seed, 0);
    let y = uniform_simplex(n, &mut rng);
    let perms: Vec<Vec<usize>> = (0..n).map(|_| random_permutation(n, &mut rng)).collect();
    let weights = uniform_simplex(n, &mut rng);
    let x = mat_vec(&doubly_stochastic(&perms, &weights), &y);
    Ok((SpectrumVector::from_unsorted(x), SpectrumVector::from_unsorted(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(v: &[f64]) -> SpectrumVector {
        SpectrumVector::probability(v.to_vec()).unwrap()
    }

    #[test]
    fn majorization_examples() {
        assert!(is_majorized_by(&spec(&[0.5, 0.5]), &spec(&[1.0, 0.0])).unwrap());
        assert!(!is_majorized_by(&spec(&[0.7, 0.3]), &spec(&[0.6, 0.4])).unwrap());
        let v = spec(&[0.5, 0.3, 0.2]);
        assert!(is_majorized_by(&v, &v).unwrap());
        assert!(matches!(
            is_majorized_by(&spec(&[0.5, 0.5]), &spec(&[1.0, 0.0, 0.0])),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn chong_examples() {
        assert!(is_chong_matrix(&[vec![0.9, 0.1], vec![0.1, 0.9]]));
        assert!(!is_chong_matrix(&[vec![0.9, 0.1], vec![0.8, 0.2]]));
        let orbit = permutation_orbit(&[0.7, 0.2, 0.1], 1.0);
        assert_eq!(orbit.len(), 6);
        assert!(is_chong_matrix(&orbit));
        // duplicated row breaks the multiset balance
        assert!(!is_chong_matrix(&[vec![0.9, 0.1], vec![0.1, 0.9], vec![0.1, 0.9]]));
    }

    #[test]
    fn pair_boundaries() {
        let y = [0.6, 0.3, 0.1];
        let ident = doubly_stochastic(&[vec![0, 1, 2]], &[1.0]);
        assert_eq!(mat_vec(&ident, &y), y.to_vec());
        let all: Vec<Vec<usize>> = permutation_orbit(&[0.0, 1.0, 2.0], 1.0)
            .into_iter()
            .map(|r| r.into_iter().map(|v| v as usize).collect())
            .collect();
        let uniform = doubly_stochastic(&all, &[1.0 / 6.0; 6]);
        for v in mat_vec(&uniform, &y) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_pairs_are_ordered() {
        for seed in 0..200 {
            let (x, y) = random_majorization_pair(2 + (seed as usize % 5), seed).unwrap();
            assert!(is_majorized_by(&x, &y).unwrap());
        }
    }
}
