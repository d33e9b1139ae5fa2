//! Dense complex matrices and the Hermitian eigen/polar machinery everything
//! else is built on.
//!
//! Dimensions here are small (N ≤ 64), so the decompositions are plain cyclic
//! Jacobi sweeps: two-sided for Hermitian eigenproblems and one-sided
//! (Hestenes) for the singular value decomposition behind the polar form.
//! Both are accurate to a few ulps relative to the matrix norm, which is what
//! the entropy and completeness checks downstream rely on.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)] // the lint misfires against unstable inherent f64 methods in core
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::SpectrumVector;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for the Hermiticity precondition of [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadShape(alloc::format!(
                "{} entries for dimension {}",
                data.len(),
                dim
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim || re.iter().chain(im).any(|row| row.len() != dim) {
            return Err(Error::BadShape(alloc::format!(
                "real/imaginary parts are not both {dim}x{dim}"
            )));
        }
        let data = re
            .iter()
            .zip(im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)))
            .collect();
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diag(&vec![1.0; dim])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(ket: &[Complex64]) -> Self {
        Self::from_fn(ket.len(), |i, j| ket[i] * ket[j].conj())
    }

    /// The Pauli-X (bit flip) matrix.
    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn real_part(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_part(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance ‖self − other‖.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |A − A†|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    /// ‖AB − BA‖_F
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (self * other).distance(&(other * self))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// A X A†
    pub fn sandwich(&self, x: &Self) -> Self {
        &(self * x) * &self.adjoint()
    }

    /// ⟨ψ|A|ψ⟩ (real part; exact for Hermitian A).
    pub fn expectation(&self, ket: &[Complex64]) -> f64 {
        let av = self.apply(ket);
        ket.iter().zip(&av).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    /// Re Tr[A B] without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    /// ‖U†U − I‖_F
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).distance(&Self::identity(self.dim))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Sum of a non-empty list of equally sized matrices.
pub fn sum_matrices<'a>(dim: usize, items: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    items
        .into_iter()
        .fold(ComplexMatrix::zeros(dim), |acc, m| &acc + m)
}

/// Unitary 2×2 rotation acting on index pair (p, q) that zeroes the (p, q)
/// entry of the Hermitian block [[a, g], [g*, b]].
#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    /// e^{-iφ} where g = |g| e^{iφ}
    phase: Complex64,
}

impl Rotation {
    fn new(a: f64, b: f64, g: Complex64) -> Self {
        let r = g.norm();
        let phase = (g / r).conj();
        let tau = (b - a) / (2.0 * r);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Self { c, s: t * c, phase }
    }

    /// M ← M G on columns p, q.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let n = m.dim;
        for k in 0..n {
            let mp = m.data[k * n + p];
            let mq = m.data[k * n + q];
            m.data[k * n + p] = mp * self.c - mq * self.phase * self.s;
            m.data[k * n + q] = mp * self.s + mq * self.phase * self.c;
        }
    }

    /// M ← G† M on rows p, q.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let n = m.dim;
        let ph = self.phase.conj();
        for k in 0..n {
            let mp = m.data[p * n + k];
            let mq = m.data[q * n + k];
            m.data[p * n + k] = mp * self.c - mq * ph * self.s;
            m.data[q * n + k] = mp * self.s + mq * ph * self.c;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back sorted descending (ties keep their original index
/// order); column k of the returned matrix is the eigenvector for value k.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<(SpectrumVector, ComplexMatrix)> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a[(p, q)];
                    if g.norm() <= 1e-300 {
                        continue;
                    }
                    let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, g);
                    rot.apply_right(&mut a, p, q);
                    rot.apply_left_adjoint(&mut a, p, q);
                    rot.apply_right(&mut v, p, q);
                    a[(p, q)] = C0;
                    a[(q, p)] = C0;
                    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                }
            }
        }
    }
    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps index order among ties
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| raw[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok((SpectrumVector::from_sorted_unchecked(values), vectors))
}

/// V f(Λ) V† for Hermitian H.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eig_hermitian(h)?;
    Ok(reassemble(&vecs, &vals.values().iter().map(|&x| f(x)).collect::<Vec<_>>()))
}

/// V diag(d) V†
pub fn reassemble(vecs: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let n = vecs.dim;
    let mut out = ComplexMatrix::zeros(n);
    for (k, &dk) in d.iter().enumerate() {
        if dk == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * dk;
            for j in 0..n {
                out.data[i * n + j] += vik * vecs[(j, k)].conj();
            }
        }
    }
    out.hermitian_part()
}

/// Principal square root of a positive semidefinite matrix. Small negative
/// eigenvalues from rounding are clamped to zero.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_function(h, |x| if x > 0.0 { x.sqrt() } else { 0.0 })
}

/// Singular value decomposition A = W Σ V† by one-sided Jacobi.
///
/// Returns (B, σ, V) with B = A V having mutually orthogonal columns of norm σ.
fn one_sided_jacobi(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let n = a.dim;
    let mut b = a.clone();
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C0;
                for k in 0..n {
                    let bp = b[(k, p)];
                    let bq = b[(k, q)];
                    alpha += bp.norm_sqr();
                    beta += bq.norm_sqr();
                    gamma += bp.conj() * bq;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut b, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = (0..n)
        .map(|k| (0..n).map(|i| b[(i, k)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    (b, sigma, v)
}

/// Polar decomposition Ω = U Q with Q = √(Ω†Ω) and U unitary.
///
/// On the kernel of Q, U is completed with computational basis vectors taken
/// in index order (Gram–Schmidt against the columns already fixed).
pub fn polar_decompose(omega: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = omega.dim;
    let (b, sigma, v) = one_sided_jacobi(omega);
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = (n as f64) * f64::EPSILON * smax;

    let mut w = ComplexMatrix::zeros(n);
    let mut fixed: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut kernel = Vec::new();
    for k in 0..n {
        if sigma[k] > cutoff && sigma[k] > 0.0 {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, k)] / sigma[k]).collect();
            fixed.push(col.clone());
            for i in 0..n {
                w[(i, k)] = col[i];
            }
        } else {
            kernel.push(k);
        }
    }
    let mut next_basis = 0;
    for &k in &kernel {
        let col = loop {
            let mut e = vec![C0; n];
            e[next_basis] = C1;
            next_basis += 1;
            let r = orthogonalize(&e, &fixed);
            let nrm = norm(&r);
            if nrm * nrm >= 0.5 / n as f64 || next_basis == n {
                break r.into_iter().map(|z| z / nrm).collect::<Vec<_>>();
            }
        };
        fixed.push(col.clone());
        for i in 0..n {
            w[(i, k)] = col[i];
        }
    }
    let u = &w * &v.adjoint();
    let sigma_eff: Vec<f64> = sigma
        .iter()
        .map(|&s| if s > cutoff { s } else { 0.0 })
        .collect();
    let q = reassemble(&v, &sigma_eff);
    (u, q)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Removes the components along an orthonormal set (two Gram–Schmidt passes).
pub fn orthogonalize(v: &[Complex64], basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for u in basis {
            let c = inner(u, &r);
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
    }
    r
}

/// Orthonormalizes the columns of a square matrix in order (modified
/// Gram–Schmidt with reorthogonalization). R gets a positive diagonal.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let r = orthogonalize(&m.column(j), &cols);
        let nrm = norm(&r);
        cols.push(r.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_matrix() -> ComplexMatrix {
        ComplexMatrix::new(
            3,
            vec![
                c(0.3, 0.1), c(-1.2, 0.4), c(0.5, 0.0),
                c(0.0, 0.9), c(0.7, -0.2), c(0.1, 0.3),
                c(-0.4, 0.6), c(0.2, 0.2), c(1.1, -0.5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn diagonal_spectrum_sorted_descending() {
        let (vals, _) = eig_hermitian(&ComplexMatrix::from_real_diag(&[0.2, 0.8])).unwrap();
        assert_eq!(vals.values(), &[0.8, 0.2]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let (vals, _) = eig_hermitian(&ComplexMatrix::pauli_x()).unwrap();
        assert!((vals.values()[0] - 1.0).abs() < 1e-15);
        assert!((vals.values()[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_reconstruction() {
        let a = sample_matrix();
        let h = &a + &a.adjoint();
        let (vals, vecs) = eig_hermitian(&h).unwrap();
        let back = reassemble(&vecs, vals.values());
        assert!(back.distance(&h) < 1e-12);
        assert!(vecs.unitarity_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(eig_hermitian(&sample_matrix()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn ties_keep_index_order() {
        let (vals, vecs) = eig_hermitian(&ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(vals.values(), &[0.5, 0.5, 0.0]);
        assert_eq!(vecs, ComplexMatrix::identity(3));
    }

    #[test]
    fn polar_of_positive_is_trivial() {
        let omega = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let (u, q) = polar_decompose(&omega);
        assert!(u.distance(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(q.distance(&omega) < 1e-15);
    }

    #[test]
    fn polar_recovers_flip() {
        let x = ComplexMatrix::pauli_x();
        let d = ComplexMatrix::from_real_diag(&[0.4, 0.9]);
        let (u, q) = polar_decompose(&(&x * &d));
        assert!(u.distance(&x) < 1e-15);
        assert!(q.distance(&d) < 1e-15);
    }

    #[test]
    fn polar_full_rank_identities() {
        let a = sample_matrix();
        let (u, q) = polar_decompose(&a);
        assert!(u.unitarity_defect() < 1e-12);
        assert!((&u * &q).distance(&a) < 1e-12);
        assert!(q.hermitian_defect() < 1e-14);
    }

    #[test]
    fn polar_rank_deficient_completes_on_kernel() {
        // X·diag(0,1) maps |1⟩ → |0⟩ and kills |0⟩
        let omega = &ComplexMatrix::pauli_x() * &ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let (u, q) = polar_decompose(&omega);
        assert!(u.unitarity_defect() < 1e-14);
        assert!((&u * &q).distance(&omega) < 1e-15);
        assert!(q.distance(&ComplexMatrix::from_real_diag(&[0.0, 1.0])) < 1e-15);
        // kernel vector |0⟩ is sent to the completion vector |1⟩
        assert!(u.distance(&ComplexMatrix::pauli_x()) < 1e-15);
        // zero matrix: U is the identity completion
        let (u0, q0) = polar_decompose(&ComplexMatrix::zeros(3));
        assert_eq!(u0, ComplexMatrix::identity(3));
        assert_eq!(q0, ComplexMatrix::zeros(3));
    }

    #[test]
    fn sqrt_squares_back() {
        let a = sample_matrix();
        let p = &a * &a.adjoint();
        let r = sqrt_psd(&p).unwrap();
        assert!((&r * &r).distance(&p) < 1e-12);
    }
}
