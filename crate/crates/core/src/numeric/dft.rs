use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unitary `L x L` DFT matrix, `F[l][k] = exp(-j 2 pi l k / L) / sqrt(L)`
/// with zero-based indices.
pub fn dft_matrix<T: Real>(len: usize) -> Result<ComplexMatrix<T>> {
    if len == 0 {
        return Err(Error::InvalidDimension("DFT length must be positive".into()));
    }
    let norm = T::of_usize(len).sqrt().recip();
    let two_pi = T::TAU();
    let n = T::of_usize(len);
    // Reduce the exponent modulo L first so large products stay exact.
    Ok(ComplexMatrix::from_fn(len, len, |l, k| {
        let idx = (l * k) % len;
        let phase = -two_pi * T::of_usize(idx) / n;
        Complex::from_polar(norm, phase)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let f1 = dft_matrix::<f64>(1).unwrap();
        assert_eq!(f1[(0, 0)], Complex::new(1.0, 0.0));

        let f2 = dft_matrix::<f64>(2).unwrap();
        let h = 0.5f64.sqrt();
        for (i, j, v) in [(0, 0, h), (0, 1, h), (1, 0, h), (1, 1, -h)] {
            assert!((f2[(i, j)] - Complex::new(v, 0.0)).norm() < 1e-15);
        }

        // Row 2, column 2 in one-based terms: exp(-j pi / 2) / 2.
        let f4 = dft_matrix::<f64>(4).unwrap();
        assert!((f4[(1, 1)] - Complex::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_length_is_an_error() {
        assert!(matches!(dft_matrix::<f64>(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn unitary() {
        for len in [3, 8, 24, 72] {
            let f = dft_matrix::<f64>(len).unwrap();
            let g = &f * &f.adjoint();
            assert!(g.max_abs_diff(&ComplexMatrix::identity(len)) < 1e-12, "L = {len}");
        }
    }
}
