use num_complex::Complex;

use super::linalg::lu_inverse;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inverse after a block rank update: returns `(Sigma + c S S^H)^{-1}` given
/// `Sigma^{-1}`, via
/// `Sigma^{-1} - c Sigma^{-1} S (I + c S^H Sigma^{-1} S)^{-1} S^H Sigma^{-1}`.
///
/// Fails with [`Error::SingularUpdate`] when the inner `P x P` system is
/// singular, in which case the caller should re-invert from scratch.
pub fn woodbury_downdate<T: Real>(
    sigma_inv: &ComplexMatrix<T>,
    block: &ComplexMatrix<T>,
    c: T,
) -> Result<ComplexMatrix<T>> {
    if !sigma_inv.is_square() || block.rows() != sigma_inv.rows() {
        return Err(Error::InvalidDimension(format!(
            "inverse is {}x{}, block is {}x{}",
            sigma_inv.rows(),
            sigma_inv.cols(),
            block.rows(),
            block.cols()
        )));
    }
    if c == T::zero() {
        return Ok(sigma_inv.clone());
    }
    let w = sigma_inv * block;
    let gram = &block.adjoint() * &w;
    woodbury_with_projection(sigma_inv, &w, &gram, c)
}

/// Same update with `W = Sigma^{-1} S` and `G = S^H W` already computed.
pub fn woodbury_with_projection<T: Real>(
    sigma_inv: &ComplexMatrix<T>,
    w: &ComplexMatrix<T>,
    gram: &ComplexMatrix<T>,
    c: T,
) -> Result<ComplexMatrix<T>> {
    let p = gram.rows();
    let inner = &ComplexMatrix::identity(p) + &gram.scale(c);
    let inner_inv = lu_inverse(&inner)?;
    let correction = &(&(w * &inner_inv) * &w.adjoint()).scale(c);
    let mut out = sigma_inv - correction;
    out.hermitize();
    Ok(out)
}

/// In-place rank-one version for a single column `s` with `w = Sigma^{-1} s`
/// and `gamma = s^H w`.
pub fn sherman_morrison_in_place<T: Real>(
    sigma_inv: &mut ComplexMatrix<T>,
    w: &[Complex<T>],
    gamma: T,
    c: T,
) -> Result<()> {
    let denom = T::one() + c * gamma;
    if denom.abs() <= T::PIVOT_TOL * (T::one() + (c * gamma).abs()) {
        return Err(Error::SingularUpdate {
            pivot: denom.to_f64_lossy(),
        });
    }
    sigma_inv.add_outer(Complex::new(-c / denom, T::zero()), w);
    sigma_inv.hermitize();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linalg::hpd_inverse;
    use crate::numeric::testutil::{random_hpd, random_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_coefficient_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inv = random_hpd(&mut rng, 4);
        let s = random_matrix(&mut rng, 4, 2);
        assert_eq!(woodbury_downdate(&inv, &s, 0.0).unwrap(), inv);
    }

    #[test]
    fn scalar_case() {
        let inv = ComplexMatrix::<f64>::identity(1);
        let s = ComplexMatrix::<f64>::identity(1);
        let out = woodbury_downdate(&inv, &s, 1.0).unwrap();
        assert!((out[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let l = rng.random_range(2..8);
            let p = rng.random_range(1..=l.min(4));
            let sigma = random_hpd(&mut rng, l);
            let s = random_matrix(&mut rng, l, p);
            let c = rng.random_range(-0.3..2.0);
            // Keep Sigma + c S S^H positive definite for negative c.
            let updated = &sigma + &(&s * &s.adjoint()).scale(c);
            let Ok(direct) = hpd_inverse(&updated) else { continue };
            let inv = hpd_inverse(&sigma).unwrap();
            let wb = woodbury_downdate(&inv, &s, c).unwrap();
            worst = worst.max(wb.max_abs_diff(&direct) / direct.max_abs().max(1.0));
        }
        assert!(worst < 1e-9, "worst {worst:e}");
    }

    #[test]
    fn six_by_six_two_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let sigma = random_hpd(&mut rng, 6);
        let s = random_matrix(&mut rng, 6, 2);
        let inv = hpd_inverse(&sigma).unwrap();
        let wb = woodbury_downdate(&inv, &s, 0.7).unwrap();
        let direct = hpd_inverse(&(&sigma + &(&s * &s.adjoint()).scale(0.7))).unwrap();
        assert!(wb.max_abs_diff(&direct) < 1e-10);
        assert!(wb.is_hermitian(0.0));
    }

    #[test]
    fn singular_inner_system() {
        // Sigma = I, s = e_1, c = -1 removes the only mass on e_1.
        let inv = ComplexMatrix::<f64>::identity(2);
        let s = ComplexMatrix::from_fn(2, 1, |i, _| Complex::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        assert!(matches!(
            woodbury_downdate(&inv, &s, -1.0),
            Err(Error::SingularUpdate { .. })
        ));
        let mut m = inv.clone();
        let w = s.column(0);
        assert!(sherman_morrison_in_place(&mut m, &w, 1.0, -1.0).is_err());
    }

    #[test]
    fn rank_one_in_place_agrees_with_block_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma = random_hpd(&mut rng, 5);
        let inv = hpd_inverse(&sigma).unwrap();
        let s = random_matrix(&mut rng, 5, 1);
        let block = woodbury_downdate(&inv, &s, 0.4).unwrap();
        let w = inv.mul_vec(&s.column(0));
        let gamma = crate::numeric::matrix::dot_conj(&s.column(0), &w).re;
        let mut m = inv.clone();
        sherman_morrison_in_place(&mut m, &w, gamma, 0.4).unwrap();
        assert!(m.max_abs_diff(&block) < 1e-12);
    }
}
