//! Full objectives evaluated by dense factorization. The detectors track
//! their objective incrementally; these are the reference values.

use crate::error::{Error, Result};
use crate::numeric::{Cholesky, ComplexMatrix};
use crate::prior::PriorModel;
use crate::scalar::Real;
use crate::signal::{covariance_actual, covariance_virtual, PilotSet, SampleCovariance, SystemConfig};

/// Which parametrization an activity vector uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivityMode {
    /// `alpha`, one entry per device.
    Actual,
    /// `beta`, one entry per (device, tap).
    Virtual,
}

pub(crate) fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

/// `log|Sigma| + tr(Sigma^{-1} Sigma_hat)`.
pub(crate) fn likelihood_terms<T: Real>(sigma: &ComplexMatrix<T>, sigma_hat: &ComplexMatrix<T>) -> Result<T> {
    let ch = Cholesky::new(sigma)?;
    let inv = ch.inverse();
    let n = sigma.rows();
    let mut tr = T::zero();
    for i in 0..n {
        for j in 0..n {
            tr += (inv[(i, j)] * sigma_hat[(j, i)]).re;
        }
    }
    Ok(ch.log_det() + tr)
}

fn conditioning<T: Real>(err: Error, activities: &[T]) -> Error {
    match err {
        Error::NotPositiveDefinite(reason) => Error::Conditioning {
            reason,
            sweeps: 0,
            last_soft: to_f64(activities),
        },
        other => other,
    }
}

/// Covariance implied by `activities` in the given parametrization.
pub fn implied_covariance<T: Real>(
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
    activities: &[T],
    mode: ActivityMode,
) -> Result<ComplexMatrix<T>> {
    match mode {
        ActivityMode::Actual => covariance_actual(cfg, pilots, activities),
        ActivityMode::Virtual => covariance_virtual(cfg, pilots, activities),
    }
}

/// Negative log-likelihood per antenna up to a constant:
/// `log|Sigma| + tr(Sigma^{-1} Sigma_hat)`.
pub fn ml_objective<T: Real>(
    sigma_hat: &SampleCovariance<T>,
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
    activities: &[T],
    mode: ActivityMode,
) -> Result<T> {
    let sigma = implied_covariance(pilots, cfg, activities, mode)?;
    likelihood_terms(&sigma, sigma_hat.matrix()).map_err(|e| conditioning(e, activities))
}

/// Prior exponent at `activities` (tap-averaged in virtual mode).
pub fn prior_exponent<T: Real>(prior: &PriorModel, activities: &[T], mode: ActivityMode, taps: usize) -> T {
    let a = to_f64(activities);
    T::lit(match mode {
        ActivityMode::Actual => prior.log_pmf_unnormalized(&a),
        ActivityMode::Virtual => prior.log_pmf_virtual(&a, taps),
    })
}

/// ML objective minus the prior exponent divided by `M`. The prior's
/// normalizer is omitted, which shifts the value by a constant.
pub fn map_objective<T: Real>(
    sigma_hat: &SampleCovariance<T>,
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
    activities: &[T],
    mode: ActivityMode,
    prior: &PriorModel,
) -> Result<T> {
    let ml = ml_objective(sigma_hat, pilots, cfg, activities, mode)?;
    let m = T::of_usize(sigma_hat.n_antennas());
    Ok(ml - prior_exponent(prior, activities, mode, cfg.n_taps) / m)
}

/// Tap-consistency penalty `eta(beta) = sum_n a_n (1 - a_n)` with `a_n` the
/// tap mean of device `n`.
pub fn penalty<T: Real>(beta: &[T], taps: usize) -> T {
    let pt = T::of_usize(taps);
    beta.chunks(taps)
        .map(|c| {
            let a = c.iter().copied().sum::<T>() / pt;
            a * (T::one() - a)
        })
        .sum()
}
