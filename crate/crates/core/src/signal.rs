//! Generative OFDM signal model after cyclic-prefix removal.
//!
//! Device `n` sends frequency-domain pilot `s~_n` over `L` subcarriers. Its
//! `P`-tap channel at antenna `m` turns the pilot into the time-domain
//! contribution `S_n h_{n,m}`, where the effective pilot matrix
//! `S_n = (F^H diag(s~_n) F)[:, 0..P]` is the first `P` columns of a circulant
//! matrix. Stacking `S = [S_1, ..., S_N]` views each tap as a virtual device
//! `i = n P + p` with flat fading, activity `beta_i = alpha_n` and gain
//! `delta_i = g_n`.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::ComplexMatrix;
use crate::prior::PriorModel;
use crate::rng::{self, Purpose};
use crate::scalar::Real;

/// Dimensions and powers of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<T> {
    /// `N`, number of potential devices.
    pub n_devices: usize,
    /// `L`, subcarriers (pilot length).
    pub n_subcarriers: usize,
    /// `M`, base station antennas.
    pub n_antennas: usize,
    /// `P`, channel taps.
    pub n_taps: usize,
    /// `sigma^2`, noise power per sample.
    pub noise_var: T,
    /// `g_n`, large-scale fading powers (linear).
    pub gains: Vec<T>,
}

impl<T: Real> SystemConfig<T> {
    /// Configuration with unit large-scale gains.
    pub fn new(n_devices: usize, n_subcarriers: usize, n_antennas: usize, n_taps: usize, noise_var: T) -> Result<Self> {
        let cfg = Self {
            n_devices,
            n_subcarriers,
            n_antennas,
            n_taps,
            noise_var,
            gains: vec![T::one(); n_devices],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_gains(mut self, gains: Vec<T>) -> Result<Self> {
        self.gains = gains;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("device count", self.n_devices),
            ("subcarrier count", self.n_subcarriers),
            ("antenna count", self.n_antennas),
            ("tap count", self.n_taps),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::InvalidDimension(format!("{name} must be at least 1")));
            }
        }
        if self.n_taps >= self.n_subcarriers {
            return Err(Error::InvalidDimension(format!(
                "tap count {} must be below the subcarrier count {}",
                self.n_taps, self.n_subcarriers
            )));
        }
        if !(self.noise_var > T::zero()) || !self.noise_var.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        if self.gains.len() != self.n_devices {
            return Err(Error::InvalidDimension(format!(
                "{} gains for {} devices",
                self.gains.len(),
                self.n_devices
            )));
        }
        if let Some(g) = self.gains.iter().find(|g| !(**g > T::zero()) || !g.is_finite()) {
            return Err(Error::InvalidConfig(format!("large-scale gain {g} must be positive")));
        }
        Ok(())
    }

    /// `N P`.
    pub fn n_virtual(&self) -> usize {
        self.n_devices * self.n_taps
    }

    /// `delta_i`, the gain of virtual device `i`.
    pub fn virtual_gain(&self, i: usize) -> T {
        self.gains[i / self.n_taps]
    }
}

/// `S_n = (F^H diag(s~) F)[:, 0..P]`.
///
/// The full product is circulant with first column `c = F^H s~ / sqrt(L)`,
/// so column `k` is `c` cyclically shifted down by `k`. The first column is
/// evaluated as an inverse DFT sum with exponents reduced modulo `L`.
pub fn effective_pilot<T: Real>(s_tilde: &[Complex<T>], taps: usize) -> Result<ComplexMatrix<T>> {
    let len = s_tilde.len();
    if len == 0 || taps == 0 || taps >= len {
        return Err(Error::InvalidDimension(format!(
            "effective pilot needs 1 <= P < L, got P = {taps}, L = {len}"
        )));
    }
    let first = circulant_first_column(s_tilde);
    Ok(ComplexMatrix::from_fn(len, taps, |l, k| first[(l + len - k) % len]))
}

fn circulant_first_column<T: Real>(s_tilde: &[Complex<T>]) -> Vec<Complex<T>> {
    let len = s_tilde.len();
    let n = T::of_usize(len);
    let scale = n.recip();
    (0..len)
        .map(|l| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &s) in s_tilde.iter().enumerate() {
                let idx = (l * k) % len;
                let phase = T::TAU() * T::of_usize(idx) / n;
                acc += s * Complex::from_polar(T::one(), phase);
            }
            acc * scale
        })
        .collect()
}

/// Pilots of all devices together with their effective pilot matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotSet<T> {
    freq: ComplexMatrix<T>,
    taps: usize,
    blocks: Vec<ComplexMatrix<T>>,
    stacked: ComplexMatrix<T>,
}

impl<T: Real> PilotSet<T> {
    /// Builds the effective pilots from frequency-domain pilots given as the
    /// columns of an `L x N` matrix. No normalization is applied.
    pub fn from_frequency_pilots(freq: ComplexMatrix<T>, taps: usize) -> Result<Self> {
        let blocks = (0..freq.cols())
            .map(|n| effective_pilot(&freq.column(n), taps))
            .collect::<Result<Vec<_>>>()?;
        let stacked = ComplexMatrix::hconcat(&blocks)?;
        Ok(Self {
            freq,
            taps,
            blocks,
            stacked,
        })
    }

    /// The same pilots viewed with a different tap count.
    pub fn with_taps(&self, taps: usize) -> Result<Self> {
        Self::from_frequency_pilots(self.freq.clone(), taps)
    }

    /// `L x N` frequency-domain pilots `s~_n` as columns.
    pub fn frequency(&self) -> &ComplexMatrix<T> {
        &self.freq
    }

    pub fn n_devices(&self) -> usize {
        self.freq.cols()
    }

    pub fn len(&self) -> usize {
        self.freq.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.cols() == 0
    }

    pub fn n_taps(&self) -> usize {
        self.taps
    }

    /// `S_n`, `L x P`.
    pub fn block(&self, n: usize) -> &ComplexMatrix<T> {
        &self.blocks[n]
    }

    /// `S = [S_1, ..., S_N]`, `L x NP`.
    pub fn stacked(&self) -> &ComplexMatrix<T> {
        &self.stacked
    }

    /// Column `i` of `S`, the signature of virtual device `i`.
    pub fn virtual_column(&self, i: usize) -> Vec<Complex<T>> {
        self.blocks[i / self.taps].column(i % self.taps)
    }

    fn check(&self, cfg: &SystemConfig<T>) -> Result<()> {
        if self.len() != cfg.n_subcarriers || self.n_devices() != cfg.n_devices || self.taps != cfg.n_taps {
            return Err(Error::InvalidDimension(format!(
                "pilots are L={} N={} P={}, system is L={} N={} P={}",
                self.len(),
                self.n_devices(),
                self.taps,
                cfg.n_subcarriers,
                cfg.n_devices,
                cfg.n_taps
            )));
        }
        Ok(())
    }

    /// Text form: one line `n l re im` per entry of `s~` (zero-based indices,
    /// shortest round-trip decimal values).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in 0..self.n_devices() {
            for l in 0..self.len() {
                let z = self.freq[(l, n)];
                let _ = writeln!(out, "{n} {l} {:?} {:?}", z.re.to_f64_lossy(), z.im.to_f64_lossy());
            }
        }
        out
    }

    /// Parses [`Self::to_text`] output. Every `(n, l)` entry for
    /// `n < n_devices`, `l < len` must appear exactly once; blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str, n_devices: usize, len: usize, taps: usize) -> Result<Self> {
        let mut freq = ComplexMatrix::zeros(len, n_devices);
        let mut seen = vec![false; len * n_devices];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::InvalidConfig(format!("pilot file line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(bad("expected `n l re im`"));
            }
            let n: usize = fields[0].parse().map_err(|_| bad("bad device index"))?;
            let l: usize = fields[1].parse().map_err(|_| bad("bad subcarrier index"))?;
            let re: f64 = fields[2].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = fields[3].parse().map_err(|_| bad("bad imaginary part"))?;
            if n >= n_devices || l >= len {
                return Err(bad("index out of range"));
            }
            if std::mem::replace(&mut seen[n * len + l], true) {
                return Err(bad("duplicate entry"));
            }
            freq[(l, n)] = Complex::new(T::lit(re), T::lit(im));
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidConfig(format!(
                "pilot file is missing device {} subcarrier {}",
                k / len,
                k % len
            )));
        }
        Self::from_frequency_pilots(freq, taps)
    }
}

/// Draws i.i.d. `CN(0, 1)` pilots and rescales each to norm `sqrt(L)`.
pub fn generate_pilots_with<T: Real>(cfg: &SystemConfig<T>, rng: &mut impl Rng) -> Result<PilotSet<T>> {
    cfg.validate()?;
    let len = cfg.n_subcarriers;
    let target = T::of_usize(len).sqrt();
    let mut columns = Vec::with_capacity(cfg.n_devices);
    for _ in 0..cfg.n_devices {
        let mut col: Vec<Complex<T>> = (0..len).map(|_| rng::complex_normal(rng)).collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in &mut col {
            *z = *z * (target / norm);
        }
        columns.push(col);
    }
    PilotSet::from_frequency_pilots(ComplexMatrix::from_columns(&columns)?, cfg.n_taps)
}

/// [`generate_pilots_with`] on the pilot stream of `seed`.
pub fn generate_pilots<T: Real>(cfg: &SystemConfig<T>, seed: u64) -> Result<PilotSet<T>> {
    generate_pilots_with(cfg, &mut rng::seeded(seed, Purpose::Pilot))
}

/// True activities and small-scale fading of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    activity: Vec<bool>,
    n_antennas: usize,
    n_taps: usize,
    /// `h[(n M + m) P + p]`.
    taps: Vec<Complex<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn new(activity: Vec<bool>, n_antennas: usize, n_taps: usize, taps: Vec<Complex<T>>) -> Result<Self> {
        if taps.len() != activity.len() * n_antennas * n_taps {
            return Err(Error::InvalidDimension(format!(
                "{} tap coefficients for N={} M={} P={}",
                taps.len(),
                activity.len(),
                n_antennas,
                n_taps
            )));
        }
        Ok(Self {
            activity,
            n_antennas,
            n_taps,
            taps,
        })
    }

    /// Draws `h_{n,m,p}` i.i.d. `CN(0, 1)` for the given activities.
    pub fn draw(cfg: &SystemConfig<T>, activity: Vec<bool>, rng: &mut impl Rng) -> Result<Self> {
        let count = cfg.n_devices * cfg.n_antennas * cfg.n_taps;
        let taps = (0..count).map(|_| rng::complex_normal(rng)).collect();
        Self::new(activity, cfg.n_antennas, cfg.n_taps, taps)
    }

    /// `alpha`.
    pub fn activity(&self) -> &[bool] {
        &self.activity
    }

    /// `beta`, each device's activity repeated once per tap.
    pub fn virtual_activity(&self) -> Vec<bool> {
        self.activity
            .iter()
            .flat_map(|&a| std::iter::repeat(a).take(self.n_taps))
            .collect()
    }

    /// `h_{n,m}`, length `P`.
    pub fn taps(&self, n: usize, m: usize) -> &[Complex<T>] {
        let start = (n * self.n_antennas + m) * self.n_taps;
        &self.taps[start..start + self.n_taps]
    }
}

/// Draws activities from a prior.
pub fn draw_activities(prior: &PriorModel, n_devices: usize, rng: &mut impl Rng) -> Result<Vec<bool>> {
    prior.sample(n_devices, rng)
}

/// `L x M` noise with i.i.d. `CN(0, noise_var)` entries.
pub fn draw_noise<T: Real>(rows: usize, cols: usize, noise_var: T, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let sd = noise_var.sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| rng::complex_normal::<T>(rng) * sd)
}

fn check_realization<T: Real>(cfg: &SystemConfig<T>, pilots: &PilotSet<T>, real: &ChannelRealization<T>, noise: &ComplexMatrix<T>) -> Result<()> {
    pilots.check(cfg)?;
    if real.activity.len() != cfg.n_devices || real.n_antennas != cfg.n_antennas || real.n_taps != cfg.n_taps {
        return Err(Error::InvalidDimension("channel realization does not match the system".into()));
    }
    if noise.rows() != cfg.n_subcarriers || noise.cols() != cfg.n_antennas {
        return Err(Error::InvalidDimension("noise matrix does not match the system".into()));
    }
    Ok(())
}

/// Received signal in the actual-device form,
/// `r_m = sum_n alpha_n sqrt(g_n) S_n h_{n,m} + n_m`.
pub fn received_actual<T: Real>(
    cfg: &SystemConfig<T>,
    pilots: &PilotSet<T>,
    real: &ChannelRealization<T>,
    noise: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    check_realization(cfg, pilots, real, noise)?;
    let mut r = noise.clone();
    for n in (0..cfg.n_devices).filter(|&n| real.activity[n]) {
        let amp = cfg.gains[n].sqrt();
        let block = pilots.block(n);
        for m in 0..cfg.n_antennas {
            let h = real.taps(n, m);
            for l in 0..cfg.n_subcarriers {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (p, &hp) in h.iter().enumerate() {
                    acc += block[(l, p)] * hp;
                }
                r[(l, m)] += acc * amp;
            }
        }
    }
    Ok(r)
}

/// Received signal in the virtual-device form, `r_m = S B G^{1/2} h_m + n_m`
/// with `h_m` the stacked taps of all devices.
pub fn received_virtual<T: Real>(
    cfg: &SystemConfig<T>,
    pilots: &PilotSet<T>,
    real: &ChannelRealization<T>,
    noise: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    check_realization(cfg, pilots, real, noise)?;
    let beta = real.virtual_activity();
    let nv = cfg.n_virtual();
    let weights = ComplexMatrix::from_fn(nv, cfg.n_antennas, |i, m| {
        let n = i / cfg.n_taps;
        if beta[i] {
            real.taps(n, m)[i % cfg.n_taps] * cfg.virtual_gain(i).sqrt()
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(&(pilots.stacked() * &weights) + noise)
}

/// Draws noise and returns the received signal in actual-device form.
pub fn synthesize_received<T: Real>(
    cfg: &SystemConfig<T>,
    pilots: &PilotSet<T>,
    real: &ChannelRealization<T>,
    rng: &mut impl Rng,
) -> Result<ComplexMatrix<T>> {
    let noise = draw_noise(cfg.n_subcarriers, cfg.n_antennas, cfg.noise_var, rng);
    received_actual(cfg, pilots, real, &noise)
}

/// `R R^H / M` together with the `M` it averages over.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCovariance<T> {
    matrix: ComplexMatrix<T>,
    n_antennas: usize,
}

impl<T: Real> SampleCovariance<T> {
    /// Wraps a given Hermitian matrix, e.g. a population covariance.
    pub fn from_matrix(matrix: ComplexMatrix<T>, n_antennas: usize) -> Result<Self> {
        if !matrix.is_square() || n_antennas == 0 {
            return Err(Error::InvalidDimension("sample covariance must be square with M >= 1".into()));
        }
        let mut matrix = matrix;
        matrix.hermitize();
        Ok(Self { matrix, n_antennas })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }
}

/// `R R^H / M`.
pub fn sample_covariance<T: Real>(r: &ComplexMatrix<T>) -> Result<SampleCovariance<T>> {
    let m = r.cols();
    if m == 0 {
        return Err(Error::InvalidDimension("received signal has no antennas".into()));
    }
    let mut cov = (r * &r.adjoint()).scale(T::of_usize(m).recip());
    cov.hermitize();
    Ok(SampleCovariance {
        matrix: cov,
        n_antennas: m,
    })
}

/// `Sigma(alpha) = sum_n alpha_n g_n S_n S_n^H + sigma^2 I` for soft `alpha`.
pub fn covariance_actual<T: Real>(cfg: &SystemConfig<T>, pilots: &PilotSet<T>, alpha: &[T]) -> Result<ComplexMatrix<T>> {
    pilots.check(cfg)?;
    if alpha.len() != cfg.n_devices {
        return Err(Error::InvalidDimension(format!("{} activities for {} devices", alpha.len(), cfg.n_devices)));
    }
    let mut sigma = ComplexMatrix::<T>::identity(cfg.n_subcarriers).scale(cfg.noise_var);
    for (n, &a) in alpha.iter().enumerate() {
        if a == T::zero() {
            continue;
        }
        let s = pilots.block(n);
        let outer = s * &s.adjoint();
        sigma = &sigma + &outer.scale(a * cfg.gains[n]);
    }
    sigma.hermitize();
    Ok(sigma)
}

/// `Sigma(beta) = S B G S^H + sigma^2 I` for soft `beta`.
pub fn covariance_virtual<T: Real>(cfg: &SystemConfig<T>, pilots: &PilotSet<T>, beta: &[T]) -> Result<ComplexMatrix<T>> {
    pilots.check(cfg)?;
    if beta.len() != cfg.n_virtual() {
        return Err(Error::InvalidDimension(format!("{} activities for {} virtual devices", beta.len(), cfg.n_virtual())));
    }
    let mut sigma = ComplexMatrix::<T>::identity(cfg.n_subcarriers).scale(cfg.noise_var);
    for (i, &b) in beta.iter().enumerate() {
        if b != T::zero() {
            sigma.add_outer(Complex::new(b * cfg.virtual_gain(i), T::zero()), &pilots.virtual_column(i));
        }
    }
    sigma.hermitize();
    Ok(sigma)
}
