//! Coordinate-descent activity detectors.
//!
//! Six detectors combine two estimators with three parametrizations:
//!
//! | kind           | estimator | variables | tap coupling              |
//! |----------------|-----------|-----------|---------------------------|
//! | `ml-act`       | ML        | `alpha`   | exact (rank-`P` updates)  |
//! | `ml-virt-pen`  | ML        | `beta`    | penalty `rho * eta(beta)` |
//! | `ml-virt-rel`  | ML        | `beta`    | dropped, averaged after   |
//! | `map-act`      | MAP       | `alpha`   | exact                     |
//! | `map-virt-pen` | MAP       | `beta`    | penalty                   |
//! | `map-virt-rel` | MAP       | `beta`    | dropped                   |
//!
//! `bl-ml-flat` is the flat-fading baseline: it runs `ml-virt-rel` with one
//! tap, treating each device's pilot as a single signature.
//!
//! All detectors start from zero activity with `Sigma^{-1} = I / sigma^2`,
//! visit coordinates in sweeps, take the exact minimizer of each coordinate
//! problem and maintain `Sigma^{-1}` by rank updates, re-inverting from
//! scratch every `refresh_interval` accepted updates.

mod coordinate;
mod objective;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::seq::SliceRandom;

pub use coordinate::{
    virtual_quadratics, ActualCoordinate, CoordinateQuadratic, CoordinateStep, PenaltyTerm, VirtualCoordinate,
};
pub use objective::{implied_covariance, map_objective, ml_objective, penalty, prior_exponent, ActivityMode};

use crate::error::{Error, Result};
use crate::numeric::{hpd_inverse, sherman_morrison_in_place, woodbury_with_projection, ComplexMatrix};
use crate::prior::{log_odds, PriorModel};
use crate::rng::{self, Purpose};
use crate::scalar::Real;
use crate::signal::{PilotSet, SampleCovariance, SystemConfig};
use objective::{likelihood_terms, to_f64};

/// Detector variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    MlAct,
    MlVirtPen,
    MlVirtRel,
    MapAct,
    MapVirtPen,
    MapVirtRel,
    BlMlFlat,
}

impl DetectorKind {
    /// The six proposed detectors, without the baseline.
    pub const PROPOSED: [DetectorKind; 6] = [
        Self::MlAct,
        Self::MlVirtPen,
        Self::MlVirtRel,
        Self::MapAct,
        Self::MapVirtPen,
        Self::MapVirtRel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MlAct => "ml-act",
            Self::MlVirtPen => "ml-virt-pen",
            Self::MlVirtRel => "ml-virt-rel",
            Self::MapAct => "map-act",
            Self::MapVirtPen => "map-virt-pen",
            Self::MapVirtRel => "map-virt-rel",
            Self::BlMlFlat => "bl-ml-flat",
        }
    }

    pub fn is_map(self) -> bool {
        matches!(self, Self::MapAct | Self::MapVirtPen | Self::MapVirtRel)
    }

    pub fn is_virtual(self) -> bool {
        !matches!(self, Self::MlAct | Self::MapAct)
    }

    pub fn is_penalized(self) -> bool {
        matches!(self, Self::MlVirtPen | Self::MapVirtPen)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::BlMlFlat]
            .into_iter()
            .chain(Self::PROPOSED)
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown detector kind `{s}`")))
    }
}

/// Order in which a sweep visits coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordinateOrder {
    Natural,
    /// A fresh permutation every sweep, drawn from `order_seed`.
    RandomPerSweep,
}

/// Detector settings.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    /// Penalty weight for the `*-virt-pen` kinds.
    pub rho: f64,
    /// Double `rho` after every sweep, up to [`Self::RHO_CAP`].
    pub rho_continuation: bool,
    pub max_sweeps: usize,
    /// Stop once a sweep lowers the objective by less than
    /// `tol * (1 + |objective|)`.
    pub tol: f64,
    /// Re-invert the covariance from scratch after this many rank updates.
    pub refresh_interval: usize,
    pub coordinate_order: CoordinateOrder,
    pub order_seed: u64,
    /// Record the objective after every accepted coordinate step.
    pub record_steps: bool,
}

impl DetectorConfig {
    pub const DEFAULT_RHO: f64 = 0.3;
    pub const RHO_CAP: f64 = 1e3;
    pub const DEFAULT_MAX_SWEEPS: usize = 50;
    pub const DEFAULT_TOL: f64 = 1e-6;
    pub const DEFAULT_REFRESH: usize = 100;

    pub fn new(kind: DetectorKind) -> Self {
        Self {
            kind,
            rho: Self::DEFAULT_RHO,
            rho_continuation: false,
            max_sweeps: Self::DEFAULT_MAX_SWEEPS,
            tol: Self::DEFAULT_TOL,
            refresh_interval: Self::DEFAULT_REFRESH,
            coordinate_order: CoordinateOrder::Natural,
            order_seed: 0,
            record_steps: false,
        }
    }

    pub fn validate(&self, prior: Option<&PriorModel>) -> Result<()> {
        if self.kind.is_penalized() && !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "{} needs a positive penalty weight, got {}",
                self.kind, self.rho
            )));
        }
        if self.kind.is_map() {
            prior
                .ok_or_else(|| Error::InvalidConfig(format!("{} needs an activity prior", self.kind)))?
                .check_for_map()?;
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be non-negative", self.tol)));
        }
        if self.refresh_interval == 0 {
            return Err(Error::InvalidConfig("refresh_interval must be at least 1".into()));
        }
        Ok(())
    }
}

/// Mutable part of a detector run.
#[derive(Clone, Debug)]
pub struct DetectorState<T> {
    /// `alpha` (actual kinds) or `beta` (virtual kinds), in `[0, 1]`.
    pub activities: Vec<T>,
    /// Maintained `Sigma^{-1}`.
    pub sigma_inv: ComplexMatrix<T>,
    /// Current objective of the kind.
    pub objective: T,
    pub sweeps: usize,
    pub updates_since_refresh: usize,
}

/// Result of a detector run.
#[derive(Clone, Debug)]
pub struct DetectionOutput<T> {
    /// Soft activity per actual device.
    pub soft: Vec<T>,
    /// Soft activity per virtual device, for virtual kinds.
    pub virtual_soft: Option<Vec<T>>,
    /// Objective at the start and after every sweep.
    pub objective_trace: Vec<T>,
    /// Objective after every accepted coordinate step, if requested.
    pub step_trace: Vec<T>,
    pub sweeps: usize,
    pub elapsed: Duration,
    /// `max |maintained Sigma^{-1} - direct inverse|` at the end of the run.
    pub inverse_drift: T,
    /// Coordinate problems whose minimizer was tied and resolved by taking
    /// the smallest step.
    pub ties: usize,
}

impl<T: Real> DetectionOutput<T> {
    pub fn binary(&self, theta: T) -> Vec<bool> {
        threshold(&self.soft, theta)
    }
}

/// Detector bound to one observation.
pub struct Detector<'a, T> {
    cfg: &'a SystemConfig<T>,
    pilots: &'a PilotSet<T>,
    sigma_hat: &'a SampleCovariance<T>,
    prior: Option<&'a PriorModel>,
    config: DetectorConfig,
    kind: DetectorKind,
    rho: T,
    state: DetectorState<T>,
    soft_f64: Vec<f64>,
    ties: usize,
    step_trace: Vec<T>,
}

impl<'a, T: Real> Detector<'a, T> {
    /// Sets up the zero-activity start. `bl-ml-flat` must be run through
    /// [`run_detector`] or [`baseline_flat_ml`], which supply single-tap
    /// pilots.
    pub fn new(
        cfg: &'a SystemConfig<T>,
        pilots: &'a PilotSet<T>,
        sigma_hat: &'a SampleCovariance<T>,
        prior: Option<&'a PriorModel>,
        config: DetectorConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        config.validate(prior)?;
        if config.kind == DetectorKind::BlMlFlat {
            return Err(Error::InvalidConfig(
                "the flat baseline runs through run_detector or baseline_flat_ml".into(),
            ));
        }
        if pilots.n_devices() != cfg.n_devices || pilots.len() != cfg.n_subcarriers || pilots.n_taps() != cfg.n_taps {
            return Err(Error::InvalidDimension("pilots do not match the system".into()));
        }
        if sigma_hat.matrix().rows() != cfg.n_subcarriers {
            return Err(Error::InvalidDimension("sample covariance does not match the system".into()));
        }
        if let Some(p) = prior {
            p.check_devices(cfg.n_devices)?;
        }
        let dim = if config.kind.is_virtual() { cfg.n_virtual() } else { cfg.n_devices };
        let activities = vec![T::zero(); dim];
        let sigma_inv = ComplexMatrix::identity(cfg.n_subcarriers).scale(cfg.noise_var.recip());
        let kind = config.kind;
        let rho = if kind.is_penalized() { T::lit(config.rho) } else { T::zero() };
        let mut det = Self {
            cfg,
            pilots,
            sigma_hat,
            prior,
            config,
            kind,
            rho,
            state: DetectorState {
                activities,
                sigma_inv,
                objective: T::zero(),
                sweeps: 0,
                updates_since_refresh: 0,
            },
            soft_f64: vec![0.0; dim],
            ties: 0,
            step_trace: Vec::new(),
        };
        det.state.objective = det.exact_objective()?;
        Ok(det)
    }

    /// Replaces the activities and re-inverts the covariance. Useful to
    /// examine coordinate problems away from the starting point.
    pub fn set_activities(&mut self, activities: Vec<T>) -> Result<()> {
        if activities.len() != self.state.activities.len() {
            return Err(Error::InvalidDimension(format!(
                "{} activities, expected {}",
                activities.len(),
                self.state.activities.len()
            )));
        }
        if activities.iter().any(|a| !(*a >= T::zero() && *a <= T::one())) {
            return Err(Error::InvalidConfig("activities must lie in [0, 1]".into()));
        }
        self.soft_f64 = to_f64(&activities);
        self.state.activities = activities;
        self.refresh()?;
        self.state.objective = self.exact_objective()?;
        Ok(())
    }

    pub fn state(&self) -> &DetectorState<T> {
        &self.state
    }

    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    fn mode(&self) -> ActivityMode {
        if self.kind.is_virtual() {
            ActivityMode::Virtual
        } else {
            ActivityMode::Actual
        }
    }

    fn m(&self) -> T {
        T::of_usize(self.sigma_hat.n_antennas())
    }

    /// Covariance implied by the current activities.
    pub fn covariance(&self) -> Result<ComplexMatrix<T>> {
        implied_covariance(self.pilots, self.cfg, &self.state.activities, self.mode())
    }

    /// Exact objective of the kind at the current activities.
    pub fn exact_objective(&self) -> Result<T> {
        let sigma = self.covariance()?;
        let mut f = likelihood_terms(&sigma, self.sigma_hat.matrix()).map_err(|e| self.conditioning(e))?;
        if self.kind.is_penalized() {
            f += self.rho * penalty(&self.state.activities, self.cfg.n_taps);
        }
        if self.kind.is_map() {
            let prior = self.prior.expect("validated");
            f -= prior_exponent(prior, &self.state.activities, self.mode(), self.cfg.n_taps) / self.m();
        }
        Ok(f)
    }

    fn conditioning(&self, err: Error) -> Error {
        match err {
            Error::NotPositiveDefinite(reason) => Error::Conditioning {
                reason,
                sweeps: self.state.sweeps,
                last_soft: self.collapsed_f64(),
            },
            other => other,
        }
    }

    fn collapsed_f64(&self) -> Vec<f64> {
        if self.kind.is_virtual() {
            crate::prior::tap_means(&self.soft_f64, self.cfg.n_taps)
        } else {
            self.soft_f64.clone()
        }
    }

    /// Re-inverts the covariance from scratch.
    pub fn refresh(&mut self) -> Result<()> {
        let sigma = self.covariance()?;
        self.state.sigma_inv = hpd_inverse(&sigma).map_err(|e| self.conditioning(e))?;
        self.state.updates_since_refresh = 0;
        Ok(())
    }

    /// `max |maintained Sigma^{-1} - direct inverse|`.
    pub fn inverse_drift(&self) -> Result<T> {
        let direct = hpd_inverse(&self.covariance()?).map_err(|e| self.conditioning(e))?;
        Ok(self.state.sigma_inv.max_abs_diff(&direct))
    }

    fn actual_parts(&self, n: usize, with_prior: bool) -> Result<(ActualCoordinate<T>, ComplexMatrix<T>, ComplexMatrix<T>)> {
        let s = self.pilots.block(n);
        let g = self.cfg.gains[n];
        let w = &self.state.sigma_inv * s;
        let gram = &s.adjoint() * &w;
        let mut gamma = gram.scale(g);
        gamma.hermitize();
        let mut gamma_hat = (&(&w.adjoint() * self.sigma_hat.matrix()) * &w).scale(g);
        gamma_hat.hermitize();
        let quad = CoordinateQuadratic::from_matrices(&gamma, &gamma_hat)?;
        let prior_slope = if with_prior {
            let prior = self.prior.ok_or_else(|| Error::InvalidConfig("MAP update needs a prior".into()))?;
            T::lit(prior.epsilon_actual(n, &self.soft_f64)) / self.m()
        } else {
            T::zero()
        };
        let a = self.state.activities[n];
        Ok((
            ActualCoordinate {
                quad,
                prior_slope,
                lo: -a,
                hi: T::one() - a,
            },
            w,
            gram,
        ))
    }

    /// Coordinate problem of device `n` for an actual-device kind.
    pub fn actual_coordinate(&self, n: usize, with_prior: bool) -> Result<ActualCoordinate<T>> {
        self.check_mode(ActivityMode::Actual)?;
        Ok(self.actual_parts(n, with_prior)?.0)
    }

    fn virtual_parts(&self, i: usize, rho: T, with_prior: bool) -> Result<(VirtualCoordinate<T>, Vec<Complex<T>>)> {
        let s = self.pilots.virtual_column(i);
        let (gamma, gamma_hat, w) = virtual_quadratics(&self.state.sigma_inv, self.sigma_hat.matrix(), &s);
        let taps = self.cfg.n_taps;
        let penalty = if rho > T::zero() {
            let n = i / taps;
            let mean = self.state.activities[n * taps..(n + 1) * taps].iter().copied().sum::<T>() / T::of_usize(taps);
            Some(PenaltyTerm {
                rho,
                taps,
                tap_mean: mean,
            })
        } else {
            None
        };
        let prior_slope = if with_prior {
            let prior = self.prior.ok_or_else(|| Error::InvalidConfig("MAP update needs a prior".into()))?;
            T::lit(prior.epsilon_virtual(i, &self.soft_f64, taps)) / self.m()
        } else {
            T::zero()
        };
        let b = self.state.activities[i];
        Ok((
            VirtualCoordinate {
                delta: self.cfg.virtual_gain(i),
                gamma,
                gamma_hat,
                penalty,
                prior_slope,
                lo: -b,
                hi: T::one() - b,
            },
            w,
        ))
    }

    /// Coordinate problem of virtual device `i` with penalty weight `rho`
    /// (`0` for none).
    pub fn virtual_coordinate(&self, i: usize, rho: T, with_prior: bool) -> Result<VirtualCoordinate<T>> {
        self.check_mode(ActivityMode::Virtual)?;
        Ok(self.virtual_parts(i, rho, with_prior)?.0)
    }

    fn check_mode(&self, mode: ActivityMode) -> Result<()> {
        if self.mode() != mode {
            return Err(Error::InvalidConfig(format!("{} has no {:?} coordinates", self.kind, mode)));
        }
        Ok(())
    }

    /// Solves and applies the update of coordinate `j`. Returns the
    /// accepted step (`0` when the coordinate stays put).
    pub fn update_coordinate(&mut self, j: usize) -> Result<T> {
        let map = self.kind.is_map();
        if self.kind.is_virtual() {
            let (problem, w) = self.virtual_parts(j, self.rho, map)?;
            let step = self.solve_virtual(&problem);
            if step.tied {
                self.ties += 1;
            }
            let d = self.clamp_step(j, step.d);
            if d == T::zero() {
                return Ok(d);
            }
            let c = d * problem.delta;
            let gamma = problem.gamma;
            if sherman_morrison_in_place(&mut self.state.sigma_inv, &w, gamma, c).is_err() {
                self.commit(j, d);
                self.refresh()?;
            } else {
                self.commit(j, d);
            }
            self.after_step(problem.objective(d))?;
            Ok(d)
        } else {
            let (problem, w, gram) = self.actual_parts(j, map)?;
            let step = problem.solve();
            if step.tied {
                self.ties += 1;
            }
            let d = self.clamp_step(j, step.d);
            if d == T::zero() {
                return Ok(d);
            }
            let c = d * self.cfg.gains[j];
            match woodbury_with_projection(&self.state.sigma_inv, &w, &gram, c) {
                Ok(inv) => {
                    self.state.sigma_inv = inv;
                    self.commit(j, d);
                }
                Err(_) => {
                    self.commit(j, d);
                    self.refresh()?;
                }
            }
            self.after_step(problem.objective(d))?;
            Ok(d)
        }
    }

    fn solve_virtual(&self, problem: &VirtualCoordinate<T>) -> CoordinateStep<T> {
        match self.kind {
            Self::PEN_ML | Self::PEN_MAP => problem.solve_penalized(),
            DetectorKind::MapVirtRel => {
                let d = match self.prior {
                    Some(PriorModel::Iid { q }) if *q < 0.5 => {
                        problem.solve_relaxed_map_iid(T::lit(log_odds(*q)), self.sigma_hat.n_antennas(), self.cfg.n_taps)
                    }
                    _ => problem.solve_relaxed_map(),
                };
                CoordinateStep { d, tied: false }
            }
            _ => CoordinateStep {
                d: problem.solve_relaxed_ml(),
                tied: false,
            },
        }
    }

    const PEN_ML: DetectorKind = DetectorKind::MlVirtPen;
    const PEN_MAP: DetectorKind = DetectorKind::MapVirtPen;

    /// Lands exactly on the box ends so activities stay in `[0, 1]`.
    fn clamp_step(&self, j: usize, d: T) -> T {
        let a = self.state.activities[j];
        let next = (a + d).max(T::zero()).min(T::one());
        next - a
    }

    fn commit(&mut self, j: usize, d: T) {
        let a = &mut self.state.activities[j];
        *a = (*a + d).max(T::zero()).min(T::one());
        self.soft_f64[j] = a.to_f64_lossy();
        self.state.updates_since_refresh += 1;
    }

    fn after_step(&mut self, change: T) -> Result<()> {
        self.state.objective += change;
        if self.state.updates_since_refresh >= self.config.refresh_interval {
            self.refresh()?;
        }
        if self.config.record_steps {
            self.step_trace.push(self.state.objective);
        }
        Ok(())
    }

    /// One pass over all coordinates. Returns the exact objective after it.
    pub fn sweep(&mut self, order: &[usize]) -> Result<T> {
        for &j in order {
            self.update_coordinate(j)?;
        }
        self.state.sweeps += 1;
        self.state.objective = self.exact_objective()?;
        Ok(self.state.objective)
    }

    /// Sweeps until the stopping rule fires.
    pub fn run(mut self) -> Result<DetectionOutput<T>> {
        let start = Instant::now();
        let dim = self.state.activities.len();
        let mut order: Vec<usize> = (0..dim).collect();
        let mut order_rng = rng::seeded(self.config.order_seed, Purpose::Order);
        let tol = T::lit(self.config.tol);
        let mut trace = vec![self.state.objective];
        if self.config.record_steps {
            self.step_trace.push(self.state.objective);
        }
        for _ in 0..self.config.max_sweeps {
            if self.config.coordinate_order == CoordinateOrder::RandomPerSweep {
                order.shuffle(&mut order_rng);
            }
            let before = self.state.objective;
            let after = self.sweep(&order)?;
            trace.push(after);
            if before - after < tol * (T::one() + after.abs()) {
                break;
            }
            if self.config.rho_continuation && self.kind.is_penalized() {
                let cap = T::lit(DetectorConfig::RHO_CAP);
                let next = (self.rho * T::lit(2.0)).min(cap);
                if next != self.rho {
                    self.rho = next;
                    self.state.objective = self.exact_objective()?;
                    trace.push(self.state.objective);
                }
            }
        }
        let inverse_drift = self.inverse_drift()?;
        let (soft, virtual_soft) = if self.kind.is_virtual() {
            let alpha = collapse_virtual(&self.state.activities, self.cfg.n_taps)?;
            (alpha, Some(self.state.activities))
        } else {
            (self.state.activities, None)
        };
        Ok(DetectionOutput {
            soft,
            virtual_soft,
            objective_trace: trace,
            step_trace: self.step_trace,
            sweeps: self.state.sweeps,
            elapsed: start.elapsed(),
            inverse_drift,
            ties: self.ties,
        })
    }
}

/// Minimizing step of device `n` for `ml-act`.
pub fn coord_update_ml_actual<T: Real>(det: &Detector<'_, T>, n: usize) -> Result<T> {
    Ok(det.actual_coordinate(n, false)?.solve().d)
}

/// Minimizing step of device `n` for `map-act`.
pub fn coord_update_map_actual<T: Real>(det: &Detector<'_, T>, n: usize) -> Result<T> {
    Ok(det.actual_coordinate(n, true)?.solve().d)
}

/// Minimizing step of virtual device `i` for `ml-virt-pen` with weight `rho`.
pub fn coord_update_ml_virtual_penalty<T: Real>(det: &Detector<'_, T>, i: usize, rho: T) -> Result<T> {
    Ok(det.virtual_coordinate(i, rho, false)?.solve_penalized().d)
}

/// Closed-form step of virtual device `i` for `ml-virt-rel`.
pub fn coord_update_ml_virtual_relaxed<T: Real>(det: &Detector<'_, T>, i: usize) -> Result<T> {
    Ok(det.virtual_coordinate(i, T::zero(), false)?.solve_relaxed_ml())
}

/// Minimizing step of virtual device `i` for `map-virt-pen` with weight `rho`.
pub fn coord_update_map_virtual_penalty<T: Real>(det: &Detector<'_, T>, i: usize, rho: T) -> Result<T> {
    Ok(det.virtual_coordinate(i, rho, true)?.solve_penalized().d)
}

/// Closed-form step of virtual device `i` for `map-virt-rel`. Independent
/// priors with `q < 1/2` use the closed form written in terms of `q`.
pub fn coord_update_map_virtual_relaxed<T: Real>(det: &Detector<'_, T>, i: usize) -> Result<T> {
    let problem = det.virtual_coordinate(i, T::zero(), true)?;
    Ok(match det.prior {
        Some(PriorModel::Iid { q }) if *q < 0.5 => {
            problem.solve_relaxed_map_iid(T::lit(log_odds(*q)), det.sigma_hat.n_antennas(), det.cfg.n_taps)
        }
        _ => problem.solve_relaxed_map(),
    })
}

/// Runs a detector from the zero start to convergence.
pub fn run_detector<T: Real>(
    sigma_hat: &SampleCovariance<T>,
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
    config: &DetectorConfig,
    prior: Option<&PriorModel>,
) -> Result<DetectionOutput<T>> {
    if config.kind == DetectorKind::BlMlFlat {
        return baseline_flat_with(sigma_hat, pilots, cfg, config);
    }
    Detector::new(cfg, pilots, sigma_hat, prior, config.clone())?.run()
}

/// Flat-fading ML baseline with default settings.
pub fn baseline_flat_ml<T: Real>(
    sigma_hat: &SampleCovariance<T>,
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
) -> Result<DetectionOutput<T>> {
    baseline_flat_with(sigma_hat, pilots, cfg, &DetectorConfig::new(DetectorKind::BlMlFlat))
}

/// Treats every device as a single flat-fading signature: the first column
/// of its effective pilot matrix, `F^H s~_n / sqrt(L)`, which is the exact
/// model when `P = 1`.
fn baseline_flat_with<T: Real>(
    sigma_hat: &SampleCovariance<T>,
    pilots: &PilotSet<T>,
    cfg: &SystemConfig<T>,
    config: &DetectorConfig,
) -> Result<DetectionOutput<T>> {
    let flat_pilots = pilots.with_taps(1)?;
    let mut flat_cfg = cfg.clone();
    flat_cfg.n_taps = 1;
    let mut flat = config.clone();
    flat.kind = DetectorKind::MlVirtRel;
    Detector::new(&flat_cfg, &flat_pilots, sigma_hat, None, flat)?.run()
}

/// Per-device tap means of a virtual activity vector.
pub fn collapse_virtual<T: Real>(beta: &[T], taps: usize) -> Result<Vec<T>> {
    if taps == 0 || !beta.len().is_multiple_of(taps) {
        return Err(Error::InvalidDimension(format!(
            "{} virtual activities do not split into groups of {taps}",
            beta.len()
        )));
    }
    let pt = T::of_usize(taps);
    Ok(beta.chunks(taps).map(|c| c.iter().copied().sum::<T>() / pt).collect())
}

/// `soft > theta`, elementwise.
pub fn threshold<T: Real>(soft: &[T], theta: T) -> Vec<bool> {
    soft.iter().map(|&s| s > theta).collect()
}

#[cfg(test)]
mod tests;
