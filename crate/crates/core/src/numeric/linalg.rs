//! Factorizations: Cholesky for Hermitian positive definite matrices and
//! LU with partial pivoting for the small general systems of rank updates.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower-triangular factor `L` with `A = L L^H`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    lower: ComplexMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidDimension(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let scale = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].re.abs()));
        let floor = scale * T::PIVOT_TOL;
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > floor) {
                return Err(Error::NotPositiveDefinite(format!(
                    "pivot {j} is {:e}",
                    d.to_f64_lossy()
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.unscale(djj);
            }
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &ComplexMatrix<T> {
        &self.lower
    }

    /// `log |A|`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.lower.rows()).map(|i| two * self.lower[(i, i)].re.ln()).sum()
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lower.rows();
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[(i, k)] * y[k];
            }
            y[i] = s.unscale(l[(i, i)].re);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - l[(k, i)].conj() * y[k];
            }
            y[i] = s.unscale(l[(i, i)].re);
        }
        y
    }

    /// `A^{-1}`, re-Hermitized.
    pub fn inverse(&self) -> ComplexMatrix<T> {
        let n = self.lower.rows();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex::new(T::zero(), T::zero()); n];
            e[j] = Complex::new(T::one(), T::zero());
            cols.push(self.solve_vec(&e));
        }
        let mut inv = ComplexMatrix::from_columns(&cols).expect("square");
        inv.hermitize();
        inv
    }
}

/// Inverse of a small general square matrix by LU with partial pivoting.
///
/// Returns [`Error::SingularUpdate`] carrying the offending pivot when a pivot
/// falls below `PIVOT_TOL` relative to the largest entry.
pub fn lu_inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "inverse needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.max_abs().max(T::min_positive_value());
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= scale * T::PIVOT_TOL {
            return Err(Error::SingularUpdate {
                pivot: piv_abs.to_f64_lossy(),
            });
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = t;
            }
        }
        let p = m[(col, col)];
        for j in 0..n {
            m[(col, j)] = m[(col, j)] / p;
            inv[(col, j)] = inv[(col, j)] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f.re == T::zero() && f.im == T::zero() {
                continue;
            }
            for j in 0..n {
                let mv = m[(col, j)];
                let iv = inv[(col, j)];
                m[(r, j)] = m[(r, j)] - f * mv;
                inv[(r, j)] = inv[(r, j)] - f * iv;
            }
        }
    }
    Ok(inv)
}

/// Inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(Cholesky::new(a)?.inverse())
}
