use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix stored row-major.
///
/// Sized for the small systems this crate works with (a few hundred rows at
/// most); there is no blocking or SIMD.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidDimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a real diagonal matrix.
    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Stacks equally long column vectors side by side.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidDimension("ragged columns".into()));
        }
        let data = (0..rows)
            .flat_map(|i| columns.iter().map(move |c| c[i]))
            .collect();
        Self::new(rows, cols, data)
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i: usize| self[(i, j)]).collect()
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Self {
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    /// Concatenates blocks with equal row counts left to right.
    pub fn hconcat(blocks: &[Self]) -> Result<Self> {
        let rows = blocks
            .first()
            .ok_or_else(|| Error::InvalidDimension("no blocks to concatenate".into()))?
            .rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::InvalidDimension("row counts differ".into()));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                out.data[i * cols + offset..i * cols + offset + b.cols].copy_from_slice(b.row(i));
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Replaces the matrix by `(A + A^H) / 2`.
    pub fn hermitize(&mut self) {
        assert!(self.is_square());
        let half = T::lit(0.5);
        let n = self.rows;
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = Complex::new(d.re, T::zero());
            for j in i + 1..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()).scale(half);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x^H A y`.
    pub fn sesquilinear(&self, x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
        let ay = self.mul_vec(y);
        dot_conj(x, &ay)
    }

    /// In-place `A += coef * x x^H`.
    pub fn add_outer(&mut self, coef: Complex<T>, x: &[Complex<T>]) {
        assert!(self.is_square() && self.rows == x.len());
        let n = self.rows;
        for i in 0..n {
            let xi = x[i] * coef;
            let row = &mut self.data[i * n..(i + 1) * n];
            for (a, xj) in row.iter_mut().zip(x) {
                *a += xi * xj.conj();
            }
        }
    }

    #[allow(dead_code)]
    pub(crate) fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }
}

/// `x^H y`.
pub fn dot_conj<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sqr<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum()
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in &self.data[i * self.cols..(i + 1) * self.cols] {
                write!(f, "{:+.6?}{:+.6?}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ComplexMatrix::<f64>::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::<f64>::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.0)]).unwrap();
        let ah = a.adjoint();
        assert_eq!(ah[(0, 1)], c(0.0, 1.0));
        let g = &ah * &a;
        assert!(g.is_hermitian(1e-14));
        // (A^H A)_{00} = |1+i|^2 + |-i|^2
        assert!((g[(0, 0)].re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn outer_update_matches_product() {
        let x = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let mut a = ComplexMatrix::<f64>::identity(2);
        a.add_outer(c(0.5, 0.0), &x);
        let col = ComplexMatrix::from_columns(&[x.clone()]).unwrap();
        let expected = &ComplexMatrix::identity(2) + &(&col * &col.adjoint()).scale(0.5);
        assert!(a.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn hconcat_and_blocks() {
        let a = ComplexMatrix::<f64>::identity(3);
        let b = a.column_block(1, 3);
        assert_eq!(b.cols(), 2);
        let ab = ComplexMatrix::hconcat(&[a.clone(), b]).unwrap();
        assert_eq!(ab.cols(), 5);
        assert_eq!(ab[(1, 3)], c(1.0, 0.0));
        assert_eq!(ab[(2, 4)], c(1.0, 0.0));
    }
}
