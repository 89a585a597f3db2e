//! Dense complex linear algebra and polynomial kernels shared by the
//! detectors. Matrices are small (at most a few hundred rows), so everything
//! is plain row-major storage with straightforward loops.

mod dft;
mod eig;
mod linalg;
mod matrix;
mod poly;
mod roots;
mod woodbury;

pub use dft::dft_matrix;
pub use eig::{eig_hermitian, EigenPair};
pub use linalg::{hpd_inverse, lu_inverse, Cholesky};
pub use matrix::{dot_conj, norm_sqr, ComplexMatrix};
pub use poly::{squared_factor_coeffs, RealPolynomial};
pub use roots::real_roots_in_interval;
pub use woodbury::{sherman_morrison_in_place, woodbury_downdate, woodbury_with_projection};

#[cfg(test)]
pub(crate) mod testutil {
    use num_complex::Complex;
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::ComplexMatrix;

    pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix<f64> {
        let a = random_matrix(rng, n, n);
        let mut h = &a + &a.adjoint();
        h.hermitize();
        h
    }

    /// `A A^H + I`, comfortably positive definite.
    pub fn random_hpd(rng: &mut impl Rng, n: usize) -> ComplexMatrix<f64> {
        let a = random_matrix(rng, n, n);
        let mut h = &(&a * &a.adjoint()) + &ComplexMatrix::identity(n);
        h.hermitize();
        h
    }
}
