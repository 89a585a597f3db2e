//! One-dimensional coordinate problems.
//!
//! Every detector update minimizes the change of its objective along one
//! coordinate over the box that keeps the activity in `[0, 1]`. For an actual
//! device with `P` taps the change is
//!
//! `f(d) = sum_p ln(1 + v_p d) - d sum_p u_p / (1 + v_p d) - d e`
//!
//! where `v` are the eigenvalues of `g_n S_n^H Sigma^{-1} S_n`, `u` the
//! diagonal of the matching rotation of `g_n S_n^H Sigma^{-1} Sigma_hat
//! Sigma^{-1} S_n`, and `e` the prior slope (`0` for ML). Its derivative
//! times `prod_p (1 + v_p d)^2` is a polynomial of degree `2P - 1` (ML) or
//! `2P` (MAP), whose real roots together with the box ends are the only
//! candidates.
//!
//! A virtual device is the `P = 1` case with `x = delta Gamma`,
//! `y = delta Gamma_hat`, plus the penalty change `rho (d/P)(1 - d/P - 2a)`
//! for a device whose taps currently average `a`. Its derivative numerator
//! is a cubic.

use num_complex::Complex;

use crate::error::Result;
use crate::numeric::{eig_hermitian, real_roots_in_interval, squared_factor_coeffs, ComplexMatrix, RealPolynomial};
use crate::scalar::Real;

/// Objective values closer than this are treated as tied.
fn tie_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(4.0))
}

/// Picks the candidate with the lowest objective; ties go to the smallest
/// step. Returns the step and whether a tie was broken.
fn argmin<T: Real>(candidates: &[T], f: impl Fn(T) -> T) -> (T, bool) {
    let tol = tie_tol::<T>();
    let mut best = T::zero();
    let mut best_val = f(T::zero());
    let mut tied = false;
    for &d in candidates {
        let val = f(d);
        if !val.is_finite() {
            continue;
        }
        if val < best_val - tol {
            best = d;
            best_val = val;
            tied = false;
        } else if (val - best_val).abs() <= tol && d != best {
            tied = true;
            if d.abs() < best.abs() {
                best = d;
                best_val = best_val.min(val);
            }
        }
    }
    (best, tied)
}

/// Eigenvalues `v` and rotated cross terms `u` of one actual device, with
/// the large-scale gain absorbed into both.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateQuadratic<T> {
    pub v: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Real> CoordinateQuadratic<T> {
    /// From `Gamma = g S^H Sigma^{-1} S` and
    /// `Gamma_hat = g S^H Sigma^{-1} Sigma_hat Sigma^{-1} S`.
    pub fn from_matrices(gamma: &ComplexMatrix<T>, gamma_hat: &ComplexMatrix<T>) -> Result<Self> {
        let eig = eig_hermitian(gamma)?;
        let u_mat = &eig.vectors;
        let rotated = &(&u_mat.adjoint() * gamma_hat) * u_mat;
        // Both matrices are positive semidefinite; clamp rounding noise.
        let v = eig.values.iter().map(|&x| x.max(T::zero())).collect();
        let u = rotated.diagonal_real().into_iter().map(|x| x.max(T::zero())).collect();
        Ok(Self { v, u })
    }
}

/// Coordinate problem of an actual-device detector (ML or MAP).
#[derive(Clone, Debug)]
pub struct ActualCoordinate<T> {
    pub quad: CoordinateQuadratic<T>,
    /// `epsilon_n(alpha) / M`; zero for ML.
    pub prior_slope: T,
    /// Box `[-alpha_n, 1 - alpha_n]`.
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ActualCoordinate<T> {
    /// Objective change `f(alpha + d e_n) - f(alpha)`.
    pub fn objective(&self, d: T) -> T {
        let mut f = -d * self.prior_slope;
        for (&v, &u) in self.quad.v.iter().zip(&self.quad.u) {
            let t = T::one() + v * d;
            f += t.ln() - d * u / t;
        }
        f
    }

    pub fn derivative(&self, d: T) -> T {
        let mut g = -self.prior_slope;
        for (&v, &u) in self.quad.v.iter().zip(&self.quad.u) {
            let t = T::one() + v * d;
            g += v / t - u / (t * t);
        }
        g
    }

    /// `prod_p (1 + v_p d)^2`, the factor clearing the derivative's
    /// denominators.
    pub fn denominator(&self, d: T) -> T {
        self.quad.v.iter().map(|&v| (T::one() + v * d).powi(2)).product()
    }

    /// Derivative numerator:
    /// `sum_p (v_p (1 + v_p d) - u_p) prod_{q != p} (1 + v_q d)^2
    ///  - e prod_p (1 + v_p d)^2`.
    pub fn numerator(&self) -> RealPolynomial<T> {
        let v = &self.quad.v;
        let mut acc = RealPolynomial::constant(T::zero());
        for (p, (&vp, &up)) in v.iter().zip(&self.quad.u).enumerate() {
            let lead = RealPolynomial::new(vec![vp - up, vp * vp]);
            acc = acc.add(&lead.mul(&squared_factor_coeffs(v, Some(p))));
        }
        if self.prior_slope != T::zero() {
            acc = acc.add(&squared_factor_coeffs(v, None).scale(-self.prior_slope));
        }
        acc
    }

    /// Minimizing step over the roots of the numerator, the box ends and
    /// `d = 0`. A failed root solve (including an identically zero
    /// numerator) leaves only the box ends and `0`.
    pub fn solve(&self) -> CoordinateStep<T> {
        let mut candidates = vec![self.lo, self.hi];
        if let Ok(roots) = real_roots_in_interval(&self.numerator(), self.lo, self.hi) {
            candidates.extend(roots);
        }
        let (d, tied) = argmin(&candidates, |d| self.objective(d));
        CoordinateStep { d, tied }
    }
}

/// Accepted step and whether candidates tied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateStep<T> {
    pub d: T,
    pub tied: bool,
}

/// Penalty data of a virtual coordinate.
#[derive(Clone, Copy, Debug)]
pub struct PenaltyTerm<T> {
    pub rho: T,
    /// `P`.
    pub taps: usize,
    /// Current tap mean of the device owning the coordinate.
    pub tap_mean: T,
}

/// Coordinate problem of a virtual-device detector.
#[derive(Clone, Debug)]
pub struct VirtualCoordinate<T> {
    /// `delta_i`.
    pub delta: T,
    /// `Gamma = S_i^H Sigma^{-1} S_i`.
    pub gamma: T,
    /// `Gamma_hat = S_i^H Sigma^{-1} Sigma_hat Sigma^{-1} S_i`.
    pub gamma_hat: T,
    pub penalty: Option<PenaltyTerm<T>>,
    /// `epsilon_bar_i(beta) / M`; zero for ML.
    pub prior_slope: T,
    /// Box `[-beta_i, 1 - beta_i]`.
    pub lo: T,
    pub hi: T,
}

impl<T: Real> VirtualCoordinate<T> {
    fn x(&self) -> T {
        self.delta * self.gamma
    }

    fn y(&self) -> T {
        self.delta * self.gamma_hat
    }

    /// Change of the penalty `eta` when one tap moves by `d`.
    pub fn penalty_change(&self, d: T) -> T {
        match self.penalty {
            None => T::zero(),
            Some(p) => {
                let s = d / T::of_usize(p.taps);
                p.rho * s * (T::one() - s - T::lit(2.0) * p.tap_mean)
            }
        }
    }

    pub fn objective(&self, d: T) -> T {
        let t = T::one() + d * self.x();
        t.ln() - d * self.y() / t + self.penalty_change(d) - d * self.prior_slope
    }

    pub fn derivative(&self, d: T) -> T {
        let t = T::one() + d * self.x();
        let mut g = self.x() / t - self.y() / (t * t) - self.prior_slope;
        if let Some(p) = self.penalty {
            let pt = T::of_usize(p.taps);
            g += p.rho / pt * (T::one() - T::lit(2.0) * d / pt - T::lit(2.0) * p.tap_mean);
        }
        g
    }

    /// `(1 + d delta Gamma)^2`.
    pub fn denominator(&self, d: T) -> T {
        (T::one() + d * self.x()).powi(2)
    }

    /// Cubic `A d^3 + B d^2 + C d + D` equal to derivative times
    /// denominator:
    ///
    /// - `A = -2 rho delta^2 Gamma^2 / P^2`
    /// - `B = rho delta^2 (1 - 2a) Gamma^2 / P - 4 rho delta Gamma / P^2 - e delta^2 Gamma^2`
    /// - `C = delta^2 Gamma^2 + 2 rho delta (1 - 2a) Gamma / P - 2 rho / P^2 - 2 e delta Gamma`
    /// - `D = delta Gamma - delta Gamma_hat + rho (1 - 2a) / P - e`
    ///
    /// with `e` the prior slope and `rho = 0` without a penalty.
    pub fn numerator(&self) -> RealPolynomial<T> {
        let (rho, pt, a) = match self.penalty {
            Some(p) => (p.rho, T::of_usize(p.taps), p.tap_mean),
            None => (T::zero(), T::one(), T::zero()),
        };
        let two = T::lit(2.0);
        let (dl, g, gh, e) = (self.delta, self.gamma, self.gamma_hat, self.prior_slope);
        let one_m_2a = T::one() - two * a;
        let cap_a = -two * rho * dl * dl * g * g / (pt * pt);
        let cap_b = rho * dl * dl * one_m_2a * g * g / pt - T::lit(4.0) * rho * dl * g / (pt * pt) - e * dl * dl * g * g;
        let cap_c = dl * dl * g * g + two * rho * dl * one_m_2a * g / pt - two * rho / (pt * pt) - two * e * dl * g;
        let cap_d = dl * g - dl * gh + rho * one_m_2a / pt - e;
        RealPolynomial::new(vec![cap_d, cap_c, cap_b, cap_a])
    }

    /// Minimizing step over the cubic's roots and the box ends.
    pub fn solve_penalized(&self) -> CoordinateStep<T> {
        let mut candidates = vec![self.lo, self.hi];
        if let Ok(roots) = real_roots_in_interval(&self.numerator(), self.lo, self.hi) {
            candidates.extend(roots);
        }
        let (d, tied) = argmin(&candidates, |d| self.objective(d));
        CoordinateStep { d, tied }
    }

    /// Closed-form ML step without penalty:
    /// `clip((Gamma_hat - Gamma) / (delta Gamma^2))`.
    pub fn solve_relaxed_ml(&self) -> T {
        let x = self.x();
        if !(x > T::zero()) {
            return T::zero();
        }
        self.unless_flat(self.clip((self.y() - x) / (x * x)))
    }

    /// Closed-form MAP step without penalty. With `C = prior slope`,
    /// `Delta = 1 - 4 C Gamma_hat / (delta Gamma^2)` and
    /// `s = (1 - sqrt(Delta)) / (2C) - 1 / (delta Gamma)`:
    ///
    /// - `C <= 0`: `clip(s)`;
    /// - `C > 0`, `Delta > 0`: the better of `clip(s)` and the upper end;
    /// - `C > 0`, `Delta <= 0`: the upper end.
    pub fn solve_relaxed_map(&self) -> T {
        let c = self.prior_slope;
        if c == T::zero() {
            return self.solve_relaxed_ml();
        }
        let x = self.x();
        let y = self.y();
        if !(x > T::zero()) {
            return T::zero();
        }
        let delta = T::one() - T::lit(4.0) * c * y / (x * x);
        if c < T::zero() {
            debug_assert!(delta >= T::one());
            return self.unless_flat(self.clip(self.stationary(delta)));
        }
        if delta <= T::zero() {
            return self.hi;
        }
        let s = self.clip(self.stationary(delta));
        argmin(&[s, self.hi], |d| self.objective(d)).0
    }

    /// Falls back to `0` when the closed-form step does not lower the
    /// objective beyond the tie tolerance; ties go to the smallest step.
    fn unless_flat(&self, d: T) -> T {
        argmin(&[d], |d| self.objective(d)).0
    }

    /// `(1 - sqrt(Delta)) / (2C) - 1/x`, with the first term rewritten as
    /// `2y / (x^2 (1 + sqrt(Delta)))` to avoid cancellation for small `C`.
    fn stationary(&self, delta: T) -> T {
        let x = self.x();
        let y = self.y();
        T::lit(2.0) * y / (x * x * (T::one() + delta.sqrt())) - x.recip()
    }

    /// The closed form for independent activities with probability
    /// `q < 1/2`, where `C = lambda / (M P)` with `lambda = log(q / (1 - q))`:
    /// `clip(MP / (2 lambda) (1 - sqrt(1 - 4 lambda y / (MP x^2))) - 1/x)`.
    pub fn solve_relaxed_map_iid(&self, log_odds: T, n_antennas: usize, taps: usize) -> T {
        let x = self.x();
        let y = self.y();
        if !(x > T::zero()) {
            return T::zero();
        }
        let mp = T::of_usize(n_antennas * taps);
        let delta = T::one() - T::lit(4.0) * log_odds * y / (mp * x * x);
        self.unless_flat(self.clip(self.stationary(delta)))
    }

    fn clip(&self, d: T) -> T {
        if d.is_nan() {
            return T::zero();
        }
        d.max(self.lo).min(self.hi)
    }
}

/// `Gamma` and `Gamma_hat` for one signature column `s`, with
/// `w = Sigma^{-1} s` returned for the subsequent rank-one update.
pub fn virtual_quadratics<T: Real>(
    sigma_inv: &ComplexMatrix<T>,
    sigma_hat: &ComplexMatrix<T>,
    s: &[Complex<T>],
) -> (T, T, Vec<Complex<T>>) {
    let w = sigma_inv.mul_vec(s);
    let gamma = crate::numeric::dot_conj(s, &w).re;
    let gamma_hat = sigma_hat.sesquilinear(&w, &w).re;
    (gamma.max(T::zero()), gamma_hat.max(T::zero()), w)
}
