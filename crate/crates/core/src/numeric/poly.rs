use crate::scalar::Real;

/// Real polynomial with coefficients in ascending degree order.
///
/// The stored leading coefficient may be zero; use [`RealPolynomial::degree`]
/// for the effective degree.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPolynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> RealPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            return Self { coeffs: vec![T::zero()] };
        }
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient, `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: T) -> (T, T) {
        let mut p = T::zero();
        let mut dp = T::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[T], i: usize| v.get(i).copied().unwrap_or_else(T::zero);
        Self {
            coeffs: (0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }
}

/// Coefficients of `prod_{q != p} (1 + v_q d)^2` in ascending powers of `d`.
///
/// With `exclude = None` the product runs over all of `v`. The result has
/// `2 * (number of factors) + 1` coefficients; the empty product is `[1]`.
pub fn squared_factor_coeffs<T: Real>(v: &[T], exclude: Option<usize>) -> RealPolynomial<T> {
    let two = T::lit(2.0);
    let mut acc = vec![T::one()];
    for (q, &vq) in v.iter().enumerate() {
        if Some(q) == exclude {
            continue;
        }
        let factor = [T::one(), two * vq, vq * vq];
        let mut next = vec![T::zero(); acc.len() + 2];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &f) in factor.iter().enumerate() {
                next[i + j] = next[i + j] + a * f;
            }
        }
        acc = next;
    }
    RealPolynomial { coeffs: acc }
}
