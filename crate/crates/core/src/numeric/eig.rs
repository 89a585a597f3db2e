//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! The detectors only ever decompose `P x P` matrices with `P` a handful of
//! channel taps, where Jacobi is both accurate and fast enough.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> EigenPair<T> {
    /// `U diag(v) U^H`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = ComplexMatrix::from_real_diagonal(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// `(A + A^H) / 2` before factoring.
pub fn eig_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<EigenPair<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut m = a.clone();
    m.hermitize();
    let mut u = ComplexMatrix::<T>::identity(n);

    let total = m.frobenius_norm();
    let target = T::JACOBI_TOL * total;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= target || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut u, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = m.diagonal_real();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok(EigenPair { values, vectors })
}

fn off_diagonal_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]`. The rotation is `V = diag(1, e^{-i phi}) R` on the
/// `(p, q)` plane, where the phase makes the pivot real and `R` is the usual
/// real Jacobi rotation.
fn rotate<T: Real>(m: &mut ComplexMatrix<T>, u: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let n = m.rows();
    let phase = apq.unscale(r);
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let two = T::lit(2.0);
    let tau = (aqq - app) / (two * r);
    let t = if tau == T::zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;

    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    let conj_phase = phase.conj();
    // V = [[c, s], [-e^{-i phi} s, e^{-i phi} c]]
    let v00 = cc;
    let v01 = ss;
    let v10 = -conj_phase * s;
    let v11 = conj_phase * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * v00 + akq * v10;
        m[(k, q)] = akp * v01 + akq * v11;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = v00.conj() * apk + v10.conj() * aqk;
        m[(q, k)] = v01.conj() * apk + v11.conj() * aqk;
    }
    m[(p, q)] = Complex::new(T::zero(), T::zero());
    m[(q, p)] = Complex::new(T::zero(), T::zero());
    m[(p, p)] = Complex::new(app - t * r, T::zero());
    m[(q, q)] = Complex::new(aqq + t * r, T::zero());

    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * v00 + ukq * v10;
        u[(k, q)] = ukp * v01 + ukq * v11;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::testutil::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(a: &ComplexMatrix<f64>, e: &EigenPair<f64>) {
        let n = a.rows();
        let rel = e.reconstruct().max_abs_diff(a) / a.max_abs().max(1.0);
        assert!(rel < 1e-10, "reconstruction {rel:e}");
        let uu = &e.vectors.adjoint() * &e.vectors;
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        let d = ComplexMatrix::from_real_diagonal(&e.values);
        let lhs = a * &e.vectors;
        let rhs = &e.vectors * &d;
        assert!(lhs.max_abs_diff(&rhs) < 1e-10 * a.max_abs().max(1.0));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let a = ComplexMatrix::<f64>::identity(3);
        let e = eig_hermitian(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        check(&a, &e);
    }

    #[test]
    fn two_by_two_real() {
        let a = ComplexMatrix::new(
            2,
            2,
            [2.0f64, 1.0, 1.0, 2.0].iter().map(|&x| Complex::new(x, 0.0)).collect(),
        )
        .unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        check(&a, &e);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let a = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex::new(1.0f64, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 2.0).abs() < 1e-14);
        check(&a, &e);
    }

    #[test]
    fn random_hermitian_up_to_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=16 {
            for _ in 0..5 {
                let a = random_hermitian(&mut rng, n);
                let e = eig_hermitian(&a).unwrap();
                check(&a, &e);
            }
        }
    }

    #[test]
    fn zero_matrix_and_non_square() {
        let z = ComplexMatrix::<f64>::zeros(3, 3);
        let e = eig_hermitian(&z).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
        assert!(eig_hermitian(&ComplexMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn single_precision() {
        let a = ComplexMatrix::<f32>::from_fn(3, 3, |i, j| {
            if i == j {
                Complex::new(2.0, 0.0)
            } else if i < j {
                Complex::new(0.5, 0.25)
            } else {
                Complex::new(0.5, -0.25)
            }
        });
        let e = eig_hermitian(&a).unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) < 1e-5);
    }
}
