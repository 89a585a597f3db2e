//! Real roots of low-degree real polynomials on a closed interval.
//!
//! Degrees up to three use closed forms. Higher degrees go through the
//! eigenvalues of the balanced companion matrix, computed with the shifted
//! Hessenberg QR iteration. Every candidate is polished with Newton steps on
//! the original coefficients before it is accepted.

use super::poly::RealPolynomial;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_QR_ITERATIONS: usize = 60;
const NEWTON_STEPS: usize = 4;

/// All real roots of `poly` in `[lo, hi]`, ascending.
///
/// A root is accepted when `|poly(root)| <= ROOT_TOL * max|coeff|`; roots
/// closer than `ROOT_MERGE` are merged. The all-zero polynomial yields
/// [`Error::DegeneratePolynomial`].
pub fn real_roots_in_interval<T: Real>(poly: &RealPolynomial<T>, lo: T, hi: T) -> Result<Vec<T>> {
    if !(lo <= hi) {
        return Err(Error::InvalidDimension(format!("empty interval [{lo}, {hi}]")));
    }
    let scale = poly.max_abs_coeff();
    if scale == T::zero() {
        return Err(Error::DegeneratePolynomial);
    }
    if !scale.is_finite() {
        return Err(Error::InvalidDimension("non-finite polynomial coefficient".into()));
    }

    // Leading coefficients at rounding level only move roots far outside any
    // bounded interval, so they are dropped.
    let c = poly.coeffs();
    let trim = scale * T::epsilon();
    let deg = c.iter().rposition(|x| x.abs() > trim).unwrap_or(0);
    let c = &c[..=deg];

    let candidates = match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => quadratic(c[2], c[1], c[0]),
        3 => cubic(c[3], c[2], c[1], c[0]),
        _ => companion_real_eigenvalues(c)?,
    };

    let slack = T::ROOT_TOL * (T::one() + lo.abs().max(hi.abs()));
    let accept = T::ROOT_TOL * scale;
    let mut roots: Vec<T> = candidates
        .into_iter()
        .map(|x| polish(poly, x))
        .filter(|x| x.is_finite() && *x >= lo - slack && *x <= hi + slack)
        .map(|x| x.max(lo).min(hi))
        .filter(|&x| poly.eval(x).abs() <= accept)
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::ROOT_MERGE);
    Ok(roots)
}

fn polish<T: Real>(poly: &RealPolynomial<T>, mut x: T) -> T {
    let mut best = poly.eval(x).abs();
    for _ in 0..NEWTON_STEPS {
        let (p, dp) = poly.eval_with_derivative(x);
        if p == T::zero() || dp == T::zero() {
            break;
        }
        let next = x - p / dp;
        let val = poly.eval(next).abs();
        if !(val < best) {
            break;
        }
        best = val;
        x = next;
    }
    x
}

/// Real roots of `a x^2 + b x + c` with `a != 0`, avoiding cancellation.
fn quadratic<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        // A slightly negative discriminant can hide a double root.
        let x = -b / (T::lit(2.0) * a);
        return vec![x];
    }
    let sq = disc.sqrt();
    let q = -(b + b.signum() * sq) / T::lit(2.0);
    if q == T::zero() {
        return vec![T::zero()];
    }
    vec![q / a, c / q]
}

/// Real roots of `a x^3 + b x^2 + c x + d` with `a != 0`.
fn cubic<T: Real>(a: T, b: T, c: T, d: T) -> Vec<T> {
    let b = b / a;
    let c = c / a;
    let d = d / a;
    let three = T::lit(3.0);
    let shift = b / three;
    let p = c - b * b / three;
    let q = T::lit(2.0) * b * b * b / T::lit(27.0) - b * c / three + d;
    let half_q = q / T::lit(2.0);
    let third_p = p / three;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let mut out = Vec::with_capacity(3);
    if disc > T::zero() {
        let a_ = -half_q.signum() * (half_q.abs() + disc.sqrt()).cbrt();
        let b_ = if a_ == T::zero() { T::zero() } else { -third_p / a_ };
        let t = a_ + b_;
        out.push(t - shift);
        // Near a double root the discriminant may come out barely positive;
        // offer the stationary points of the depressed cubic as well and let
        // the residual filter decide.
        if third_p < T::zero() {
            let s = (-third_p).sqrt();
            out.push(s - shift);
            out.push(-s - shift);
        }
    } else if p == T::zero() {
        out.push(-shift);
    } else {
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).max(-T::one()).min(T::one());
        let phi = arg.acos();
        let two_pi = T::TAU();
        for k in 0..3 {
            let t = T::lit(2.0) * r * ((phi - two_pi * T::of_usize(k)) / three).cos();
            out.push(t - shift);
        }
    }
    out
}

/// Real eigenvalues of the companion matrix of `c` (ascending coefficients,
/// nonzero leading coefficient, degree at least one).
fn companion_real_eigenvalues<T: Real>(c: &[T]) -> Result<Vec<T>> {
    let n = c.len() - 1;
    let lead = c[n];
    // One-based storage keeps the QR sweep indices readable.
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for k in 1..=n {
        a[1][k] = -c[n - k] / lead;
    }
    for j in 2..=n {
        a[j][j - 1] = T::one();
    }
    balance(&mut a, n);
    let (wr, wi) = hessenberg_qr(&mut a, n)?;
    Ok(wr
        .into_iter()
        .zip(wi)
        .filter(|(re, im)| im.abs() <= T::ROOT_TOL * (T::one() + re.abs()))
        .map(|(re, _)| re)
        .collect())
}

/// Diagonal similarity scaling by powers of two so row and column norms are
/// comparable. Preserves the Hessenberg pattern.
fn balance<T: Real>(a: &mut [Vec<T>], n: usize) {
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 1..=n {
                if j != i {
                    c = c + a[j][i].abs();
                    r = r + a[i][j].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let mut g = r / radix;
            let mut f = T::one();
            let s = c + r;
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 1..=n {
                    a[i][j] = a[i][j] * ginv;
                }
                for j in 1..=n {
                    a[j][i] = a[j][i] * f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (one-based, destroyed) by the
/// Francis double-shift QR iteration with deflation.
#[allow(clippy::many_single_char_names)]
fn hessenberg_qr<T: Real>(a: &mut [Vec<T>], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let zero = T::zero();
    let mut wr = vec![zero; n + 1];
    let mut wi = vec![zero; n + 1];
    let mut anorm = zero;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm = anorm + a[i][j].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = zero;
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let lu = l as usize;
                let mut s = a[lu - 1][lu - 1].abs() + a[lu][lu].abs();
                if s == zero {
                    s = anorm;
                }
                if a[lu][lu - 1].abs() + s == s {
                    a[lu][lu - 1] = zero;
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            x = a[nu][nu];
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = zero;
                nn -= 1;
            } else {
                y = a[nu - 1][nu - 1];
                w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nn - 1 {
                    p = T::lit(0.5) * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x = x + t;
                    if q >= zero {
                        z = p + if p >= zero { z.abs() } else { -z.abs() };
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != zero {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = zero;
                        wi[nu] = zero;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::Capability(
                            "companion eigenvalue iteration did not converge".into(),
                        ));
                    }
                    if its == 10 || its == 20 {
                        // Exceptional shift.
                        t = t + x;
                        for i in 1..=nu {
                            a[i][i] = a[i][i] - x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let lu = l as usize;
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        let r0 = x - z;
                        let s0 = y - z;
                        p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r0 - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == lu {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nu {
                        a[i][i - 2] = zero;
                        if i != m + 2 {
                            a[i][i - 3] = zero;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = zero;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != zero {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let norm = (p * p + q * q + r * r).sqrt();
                        let s = if p >= zero { norm } else { -norm };
                        if s != zero {
                            if k == m {
                                if lu != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nu {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    p = p + r * a[k + 2][j];
                                    a[k + 2][j] = a[k + 2][j] - p * z;
                                }
                                a[k + 1][j] = a[k + 1][j] - p * y;
                                a[k][j] = a[k][j] - p * x;
                            }
                            let mmin = nu.min(k + 3);
                            for i in lu..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    p = p + z * a[i][k + 2];
                                    a[i][k + 2] = a[i][k + 2] - p * r;
                                }
                                a[i][k + 1] = a[i][k + 1] - p * q;
                                a[i][k] = a[i][k] - p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((wr.split_off(1), wi.split_off(1)))
}
