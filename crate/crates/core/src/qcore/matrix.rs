//! Dense row-major complex matrices.
//!
//! Everything in the simulator is at most 64×64 (six qubits), so a plain
//! `Vec<Complex64>` with naive multiplication is all that is needed. The
//! Hermitian eigensolver is delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![ZERO; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from row-major entries. Entries must be finite.
    pub fn from_vec(nrows: usize, ncols: usize, data: Vec<C64>) -> Result<Self> {
        if nrows == 0 || ncols == 0 || nrows * ncols != data.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix from {} entries",
                nrows,
                ncols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("non-finite matrix entry".into()));
        }
        Ok(Self { nrows, ncols, data })
    }

    /// Build a square matrix from nested rows. Panics on ragged input, so it
    /// is meant for literal constants.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.len(), m, "ragged matrix literal");
            data.extend_from_slice(r);
        }
        Self {
            nrows: n,
            ncols: m,
            data,
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cr: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[C64]> = cr.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&refs)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn projector(psi: &[C64]) -> Self {
        Self::outer(psi, psi)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).sum()
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ar, ac, br, bc) = (self.nrows, self.ncols, other.nrows, other.ncols);
        let mut m = Self::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..br {
                    for l in 0..bc {
                        m[(i * br + k, j * bc + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut m = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.ncols..(k + 1) * other.ncols];
                let out = &mut m.data[i * other.ncols..(i + 1) * other.ncols];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        m
    }

    /// `A·B·A†`, the conjugation used by every unitary and Kraus update.
    pub fn sandwich(&self, inner: &Self) -> Self {
        self.matmul(inner).matmul(&self.adjoint())
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.nrows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Equality up to a global phase, judged entrywise after aligning the
    /// phase on the largest entry of `self`.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return false;
        }
        let (idx, _) = self
            .data
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, z)| {
                if z.norm() > best.1 {
                    (i, z.norm())
                } else {
                    best
                }
            });
        let a = self.data[idx];
        let b = other.data[idx];
        if b.norm() < 1e-14 {
            return false;
        }
        let phase = a / b;
        let phase = phase / phase.norm();
        other.scale(phase).max_abs_diff(self) <= tol
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// the matching orthonormal eigenvectors as columns.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        assert!(self.is_square());
        let n = self.nrows;
        // Symmetrize first so tiny anti-Hermitian noise cannot leak in.
        let h = self.add(&self.adjoint()).scale_re(0.5);
        let dm = DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = nalgebra::SymmetricEigen::new(dm);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vecs = Self::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            for row in 0..n {
                vecs[(row, col)] = eig.eigenvectors[(row, k)];
            }
        }
        (values, vecs)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    /// Matrix exponential of `-i·θ·H` for Hermitian `H`, via eigendecomposition.
    pub fn exp_i_hermitian(h: &Self, theta: f64) -> Self {
        let (vals, vecs) = h.hermitian_eigen();
        let phases: Vec<C64> = vals.iter().map(|&v| C64::from_polar(1.0, -theta * v)).collect();
        vecs.matmul(&Self::diag(&phases)).matmul(&vecs.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        ComplexMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        ComplexMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl ComplexMatrix {
    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for j in 0..self.ncols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Serialized as separate real and imaginary row arrays.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixParts {
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixParts {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows)
                .map(|i| (0..m.ncols).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixParts {
            real: rows(|z| z.re),
            imag: rows(|z| z.im),
        }
    }
}

impl TryFrom<&MatrixParts> for ComplexMatrix {
    type Error = Error;
    fn try_from(p: &MatrixParts) -> Result<Self> {
        let n = p.real.len();
        if n == 0 || p.imag.len() != n {
            return Err(Error::Dimension("real/imag row count mismatch".into()));
        }
        let m = p.real[0].len();
        let mut data = Vec::with_capacity(n * m);
        for (re, im) in p.real.iter().zip(&p.imag) {
            if re.len() != m || im.len() != m {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            data.extend(re.iter().zip(im).map(|(&a, &b)| c(a, b)));
        }
        ComplexMatrix::from_vec(n, m, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_basis_projectors() {
        let p0 = ComplexMatrix::projector(&[ONE, ZERO]);
        let p1 = ComplexMatrix::projector(&[ZERO, ONE]);
        let expected = ComplexMatrix::diag(&[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(p0.kron(&p1), expected);
    }

    #[test]
    fn kron_matches_index_formula() {
        let a = ComplexMatrix::from_rows(&[&[c(0.3, -1.2), c(2.0, 0.5)], &[c(-0.7, 0.1), c(1.1, 1.1)]]);
        let b = ComplexMatrix::from_rows(&[&[c(0.9, 0.2), c(-0.4, 0.0)], &[c(0.0, 3.0), c(0.25, -0.5)]]);
        let k = a.kron(&b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let direct = a[(i, j)] * b[(p, q)];
                        assert!((k[(2 * i + p, 2 * j + q)] - direct).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn from_vec_rejects_bad_shape_and_nan() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn eigen_reconstructs() {
        let h = ComplexMatrix::from_rows(&[&[c(1.0, 0.0), c(0.0, -0.5)], &[c(0.0, 0.5), c(-0.2, 0.0)]]);
        let (vals, vecs) = h.hermitian_eigen();
        assert!(vals[0] <= vals[1]);
        let rebuilt = vecs
            .matmul(&ComplexMatrix::diag(&[c(vals[0], 0.0), c(vals[1], 0.0)]))
            .matmul(&vecs.adjoint());
        assert!(rebuilt.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn parts_round_trip() {
        let m = ComplexMatrix::from_rows(&[&[c(1.0, 2.0), c(3.0, -4.0)]]);
        let parts = MatrixParts::from(&m);
        assert_eq!(ComplexMatrix::try_from(&parts).unwrap(), m);
    }
}
