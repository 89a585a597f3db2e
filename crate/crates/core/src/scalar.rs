//! Real scalar abstraction used by the numeric kernels and detectors.

use std::fmt::{Debug, Display};
use std::iter::{Product, Sum};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar: `f32` or `f64`.
///
/// Tolerances that the algorithms need are exposed as associated constants so
/// that single precision gets thresholds it can actually meet.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Sum + Product + Send + Sync + 'static
{
    /// Relative tolerance for accepting a polynomial root as real and as a
    /// root (imaginary part, residual).
    const ROOT_TOL: Self;
    /// Roots closer than this are merged.
    const ROOT_MERGE: Self;
    /// Relative pivot size below which a factorization is declared singular.
    const PIVOT_TOL: Self;
    /// Convergence threshold for the Jacobi eigen sweeps.
    const JACOBI_TOL: Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const ROOT_TOL: Self = 1e-8;
    const ROOT_MERGE: Self = 1e-10;
    const PIVOT_TOL: Self = 1e-13;
    const JACOBI_TOL: Self = 1e-15;
}

impl Real for f32 {
    const ROOT_TOL: Self = 1e-3;
    const ROOT_MERGE: Self = 1e-5;
    const PIVOT_TOL: Self = 1e-6;
    const JACOBI_TOL: Self = 1e-7;
}
