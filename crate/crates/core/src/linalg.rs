//! Dense square complex matrices and the few factorizations the crate needs.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

// float methods for no_std builds; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_dim, Error, Result};
use crate::C64;

/// Dense `dim x dim` complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive"));
        }
        ensure_dim(dim * dim, data.len())?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Frobenius norm divided by `sqrt(dim)`; equals the operator norm on unitary matrices.
    pub fn normalized_norm(&self) -> f64 {
        self.frobenius_norm() / (self.dim as f64).sqrt()
    }

    /// Real inner product `Re tr(self^H other)`.
    pub fn real_inner(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        ensure_dim(self.dim, rhs.dim)?;
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Matrix) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "commutator of matrices of different size");
        &self.mul_unchecked(other) - &other.mul_unchecked(self)
    }

    pub fn anticommutator(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "anticommutator of matrices of different size");
        &self.mul_unchecked(other) + &other.mul_unchecked(self)
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diagonal(blocks: &[&Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let mut out = Matrix::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    out[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.dim;
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[(r, col)].norm().total_cmp(&a[(s, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() == 0.0 {
                return Err(Error::InvalidInput("matrix is singular"));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= factor * ac;
                    inv[(r, j)] -= factor * ic;
                }
            }
        }
        Ok(inv)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let n = self.dim;
        let cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| self[(i, j)]).collect()).collect();
        singular_values(&cols)
    }

    /// Ratio of extreme singular values; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different size");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different size");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "multiplying matrices of different size");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different size");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different size");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Matrix {
    /// `self += c * rhs`
    pub fn axpy(&mut self, c: C64, rhs: &Matrix) {
        assert_eq!(self.dim, rhs.dim, "axpy on matrices of different size");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }
}

/// Singular values of the matrix whose columns are `columns` (all of equal length),
/// by one-sided Jacobi rotations. Returned in descending order.
pub fn singular_values(columns: &[Vec<C64>]) -> Vec<f64> {
    if columns.is_empty() {
        return Vec::new();
    }
    let len = columns[0].len();
    assert!(columns.iter().all(|c| c.len() == len), "ragged column set");
    // Rotate over the shorter side.
    let mut cols: Vec<Vec<C64>> = if columns.len() > len {
        (0..len)
            .map(|i| columns.iter().map(|c| c[i].conj()).collect())
            .collect()
    } else {
        columns.to_vec()
    };
    let n = cols.len();
    let eps = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = *b * phase.conj();
                    let ap = *a;
                    *a = ap * c - bq * s;
                    *b = ap * s + bq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Relative singular-value cutoff used for rank and nullity decisions.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(columns: &[Vec<C64>], rel_tol: f64) -> usize {
    let sv = singular_values(columns);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Incrementally grown orthonormal basis of a subspace of `C^n`.
///
/// Candidates are accepted when the residual after two rounds of Gram-Schmidt
/// exceeds `rel_tol` times the candidate's own norm.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    rel_tol: f64,
    basis: Vec<Vec<C64>>,
}

impl SpanBasis {
    pub fn new(len: usize, rel_tol: f64) -> Self {
        Self {
            len,
            rel_tol,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() >= self.len
    }

    /// Tries to extend the basis with `v`; returns whether it was independent.
    pub fn insert(&mut self, v: &[C64]) -> bool {
        assert_eq!(v.len(), self.len, "vector length differs from span ambient dimension");
        if self.is_full() {
            return false;
        }
        let norm0 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            return false;
        }
        let mut r: Vec<C64> = v.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let c: C64 = b.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= self.rel_tol * norm0 {
            return false;
        }
        for z in r.iter_mut() {
            *z /= norm;
        }
        self.basis.push(r);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_row_major(2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.5)]).unwrap();
        let prod = &m * &m.inverse().unwrap();
        assert!((&prod - &Matrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_row_major(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!(m.inverse().is_err());
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = Matrix::diagonal(&[c(3.0, 0.0), c(0.0, -2.0), c(0.5, 0.0)]);
        let sv = m.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 2.0).abs() < 1e-14 && (sv[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rank_of_dependent_columns() {
        let a = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
        let b: Vec<C64> = a.iter().map(|z| z * c(0.0, 3.0)).collect();
        let d = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)];
        assert_eq!(numerical_rank(&[a.clone(), b, d], RANK_TOLERANCE), 2);
        assert_eq!(numerical_rank(&[vec![c(0.0, 0.0); 3]], RANK_TOLERANCE), 0);
        // more columns than rows
        let cols: Vec<Vec<C64>> = (0..5).map(|k| vec![c(k as f64, 0.0), c(1.0, k as f64)]).collect();
        assert_eq!(numerical_rank(&cols, RANK_TOLERANCE), 2);
    }

    #[test]
    fn span_basis_rejects_dependent_vectors() {
        let mut s = SpanBasis::new(3, RANK_TOLERANCE);
        assert!(s.insert(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(!s.insert(&[c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(s.insert(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]));
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert_eq!(
            Matrix::from_row_major(1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }
}
