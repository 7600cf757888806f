//! Dense complex matrices and the handful of factorizations the rest of the
//! crate is built on.

mod eig;
mod json;
mod solve;
mod subspace;
mod svd;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

pub use eig::{hermitian_eig, psd_project, HermitianEig};
pub use json::MatrixJson;
pub use solve::{inverse, solve};
pub use subspace::{orthonormalize, subspace_equal, SubspaceBasis};
pub use svd::{kernel, svd, Svd};

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct MatrixC {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl MatrixC {
    /// Checked constructor: length must be `rows * cols` and every entry finite.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain(format!(
                "entry ({}, {}) is not finite",
                k / cols.max(1),
                k % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix with real entries given row by row.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "from_real: wrong entry count");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data: Vec<C64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        assert_eq!(data.len(), r * c, "from_rows: ragged input");
        Self { rows: r, cols: c, data }
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Matrix unit `E_ij` of size `n x n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// Column vector from entries.
    pub fn column(entries: &[C64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &MatrixC) {
        assert_eq!(self.shape(), other.shape(), "axpy: shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &MatrixC) -> MatrixC {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        MatrixC {
            rows: n,
            cols: p,
            data: out,
        }
    }

    /// Kronecker product with the left factor as the outer (block) index.
    pub fn kron(&self, other: &MatrixC) -> MatrixC {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        MatrixC::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `Tr(self^* other)`.
    pub fn inner(&self, other: &MatrixC) -> C64 {
        assert_eq!(self.shape(), other.shape(), "inner: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn distance(&self, other: &MatrixC) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(A + A^*) / 2`
    pub fn hermitian_part(&self) -> MatrixC {
        assert!(self.is_square(), "hermitian_part of a non-square matrix");
        MatrixC::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `‖A − A^*‖_F`
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Row-major vectorization as an `(rows*cols) x 1` column.
    pub fn vectorize(&self) -> MatrixC {
        MatrixC {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Inverse of [`vectorize`](Self::vectorize).
    pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> MatrixC {
        assert_eq!(v.len(), rows * cols, "unvectorize: wrong length");
        MatrixC {
            rows,
            cols,
            data: v.to_vec(),
        }
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> MatrixC {
        let mut m = MatrixC::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            m.set_col(j, c);
        }
        m
    }

    /// Submatrix with the given row/column index ranges.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixC {
        MatrixC::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &MatrixC) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        svd(self).singular_values.first().copied().unwrap_or(0.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn lambda_min(&self) -> f64 {
        match hermitian_eig(&self.hermitian_part()) {
            Ok(e) => e.eigenvalues.first().copied().unwrap_or(0.0),
            Err(_) => f64::NAN,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for MatrixC {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixC {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &MatrixC {
    type Output = MatrixC;
    fn add(self, rhs: &MatrixC) -> MatrixC {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MatrixC {
    type Output = MatrixC;
    fn sub(self, rhs: &MatrixC) -> MatrixC {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &MatrixC {
    type Output = MatrixC;
    fn mul(self, rhs: &MatrixC) -> MatrixC {
        self.matmul(rhs)
    }
}

impl Neg for &MatrixC {
    type Output = MatrixC;
    fn neg(self) -> MatrixC {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for MatrixC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixC {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices and other small fixtures used across tests and presets.
pub mod named {
    use super::{MatrixC, C64, I, ONE, ZERO};

    pub fn sigma_x() -> MatrixC {
        MatrixC::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    pub fn sigma_y() -> MatrixC {
        MatrixC::from_rows(&[&[ZERO, -I], &[I, ZERO]])
    }

    pub fn sigma_z() -> MatrixC {
        MatrixC::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// Cyclic shift `e_k -> e_{k+1 mod n}`.
    pub fn cyclic_shift(n: usize) -> MatrixC {
        MatrixC::from_fn(n, n, |i, j| if i == (j + 1) % n { ONE } else { ZERO })
    }

    pub fn phase(theta: f64) -> C64 {
        C64::from_polar(1.0, theta)
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn new_rejects_bad_length_and_nan() {
        assert!(matches!(
            MatrixC::new(2, 2, vec![ONE; 3]),
            Err(Error::Dimension(_))
        ));
        let mut data = vec![ONE; 4];
        data[3] = C64::new(f64::NAN, 0.0);
        assert!(matches!(MatrixC::new(2, 2, data), Err(Error::Domain(_))));
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        // xy = iz
        let xy = &x * &y;
        assert!(xy.distance(&z.scale(I)) < 1e-15);
        assert!((&x * &x).distance(&MatrixC::identity(2)) < 1e-15);
    }

    #[test]
    fn kron_block_layout() {
        let a = MatrixC::unit(2, 0, 1);
        let b = MatrixC::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let k = a.kron(&b);
        // E_01 ⊗ B places B in the top-right block.
        assert_eq!(k.block(0, 2, 2, 2), b);
        assert_eq!(k.block(0, 0, 2, 2), MatrixC::zeros(2, 2));
    }

    #[test]
    fn inner_is_trace_of_adjoint_product() {
        let a = MatrixC::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let b = MatrixC::from_fn(3, 3, |i, j| C64::new((i * j) as f64, 0.5));
        let direct = (&a.adjoint() * &b).trace();
        assert!((a.inner(&b) - direct).norm() < 1e-12);
    }

    #[test]
    fn shift_has_order_n() {
        let s = cyclic_shift(3);
        let s3 = &(&s * &s) * &s;
        assert!(s3.distance(&MatrixC::identity(3)) < 1e-15);
    }
}
