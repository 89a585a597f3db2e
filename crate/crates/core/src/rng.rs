//! Reproducible random streams.
//!
//! Every random draw in an experiment comes from a ChaCha8 generator whose
//! key is derived from `(master seed, domain, cell, trial)` by SplitMix64
//! mixing, and whose stream id is the [`Purpose`]. Streams therefore never
//! depend on execution order or thread count, calibration trials never share
//! a stream with evaluation trials, and pilots, activities, channels and noise
//! of a trial are mutually independent.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

/// Which family of trials a stream belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Evaluation = 1,
    Calibration = 2,
}

/// What a stream is used for within one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Pilot = 1,
    Activity = 2,
    Channel = 3,
    Noise = 4,
    /// Coordinate order shuffling inside a detector.
    Order = 5,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key of the trial `(domain, cell, trial)` under `master`.
pub fn trial_key(master: u64, domain: Domain, cell: u64, trial: u64) -> u64 {
    let mut k = splitmix64(master);
    k = splitmix64(k ^ domain as u64);
    k = splitmix64(k ^ cell);
    splitmix64(k ^ trial)
}

/// Generator for one purpose within a trial.
pub fn stream(key: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(purpose as u64);
    rng
}

/// Generator for standalone use (e.g. pilots from a bare seed).
pub fn seeded(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    stream(splitmix64(seed), purpose)
}

/// One draw of `CN(0, 1)`: `(x + j y) / sqrt(2)` with `x, y` standard normal.
pub fn complex_normal<T: Real>(rng: &mut impl Rng) -> Complex<T> {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(x * h), T::lit(y * h))
}
