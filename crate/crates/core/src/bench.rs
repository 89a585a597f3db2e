//! Monte Carlo experiment runner.
//!
//! A trial draws pilots (unless shared), activities, channels and noise from
//! its own random streams, forms the sample covariance, runs a detector and
//! thresholds its soft output. Errors are counted per device and trial: a
//! miss is an active device declared inactive, a false alarm an inactive
//! device declared active, and the error rate is their sum over `N * trials`.
//!
//! The trial streams depend on the master seed, the scenario (system and
//! prior, but not the detector) and the trial index. Detectors compared on
//! the same scenario therefore see the same realizations, and results do not
//! depend on the number of worker threads.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::detect::{run_detector, DetectorConfig, DetectorKind};
use crate::error::{Error, Result};
use crate::prior::PriorModel;
use crate::rng::{self, Domain, Purpose};
use crate::scalar::Real;
use crate::signal::{
    generate_pilots_with, sample_covariance, synthesize_received, ChannelRealization, PilotSet, SampleCovariance,
    SystemConfig,
};

/// Threshold candidates `0.00, 0.01, ..., 1.00`.
pub const THRESHOLD_GRID: usize = 100;

/// Largest tolerated fraction of trials lost to ill-conditioning.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

/// How soft activities are turned into decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdRule {
    Fixed(f64),
    /// Grid search on separate calibration trials.
    Calibrate,
}

/// Everything that defines one experiment cell.
#[derive(Clone, Debug)]
pub struct ExperimentSpec<T> {
    pub system: SystemConfig<T>,
    /// Prior used to draw activities, and by MAP detectors.
    pub prior: PriorModel,
    pub detector: DetectorConfig,
    pub trials: usize,
    pub seed: u64,
    pub threshold: ThresholdRule,
    pub calibration_trials: usize,
    /// Use one pilot set for every trial instead of redrawing.
    pub shared_pilots: bool,
    /// Fixed pilots, e.g. loaded from a file. Implies shared pilots.
    pub pilots: Option<PilotSet<T>>,
    /// Size of the contiguous groups of a group prior, echoed in results.
    pub group_size: Option<usize>,
}

impl<T: Real> ExperimentSpec<T> {
    /// Spec with redrawn pilots, a calibrated threshold and as many
    /// calibration trials as evaluation trials.
    pub fn new(system: SystemConfig<T>, prior: PriorModel, detector: DetectorConfig, trials: usize, seed: u64) -> Self {
        Self {
            system,
            prior,
            detector,
            trials,
            seed,
            threshold: ThresholdRule::Calibrate,
            calibration_trials: trials,
            shared_pilots: false,
            pilots: None,
            group_size: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.prior.check_devices(self.system.n_devices)?;
        let prior = self.detector.kind.is_map().then_some(&self.prior);
        self.detector.validate(prior)?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        match self.threshold {
            ThresholdRule::Fixed(t) if !(0.0..=1.0).contains(&t) => {
                return Err(Error::InvalidConfig(format!("threshold {t} is outside [0, 1]")));
            }
            ThresholdRule::Calibrate if self.calibration_trials == 0 => {
                return Err(Error::InvalidConfig("calibration_trials must be at least 1".into()));
            }
            _ => {}
        }
        if let Some(p) = &self.pilots {
            if p.n_devices() != self.system.n_devices
                || p.len() != self.system.n_subcarriers
                || p.n_taps() != self.system.n_taps
            {
                return Err(Error::InvalidConfig("pilot set does not match the system".into()));
            }
        }
        Ok(())
    }

    /// Identifier of the scenario, used to derive the trial streams. It
    /// covers the system and the prior but not the detector.
    pub fn cell_id(&self) -> u64 {
        let mut h = FNV_OFFSET;
        let sys = &self.system;
        for v in [sys.n_devices, sys.n_subcarriers, sys.n_antennas, sys.n_taps] {
            h = fnv(h, &(v as u64).to_le_bytes());
        }
        h = fnv(h, &sys.noise_var.to_f64_lossy().to_bits().to_le_bytes());
        for g in &sys.gains {
            h = fnv(h, &g.to_f64_lossy().to_bits().to_le_bytes());
        }
        fnv(h, format!("{:?}", self.prior).as_bytes())
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn fnv(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// What a detector sees in one trial. `truth` is provided for oracle stubs
/// and diagnostics; real detectors must not look at it.
pub struct TrialInput<'a, T> {
    pub sigma_hat: &'a SampleCovariance<T>,
    pub pilots: &'a PilotSet<T>,
    pub system: &'a SystemConfig<T>,
    pub prior: &'a PriorModel,
    pub truth: &'a [bool],
}

/// Soft output of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialDetection {
    pub soft: Vec<f64>,
    pub sweeps: usize,
}

/// Anything that maps a trial to soft activities.
pub trait TrialDetector<T>: Sync {
    fn name(&self) -> String;
    fn detect(&self, input: &TrialInput<'_, T>) -> Result<TrialDetection>;
}

impl<T: Real> TrialDetector<T> for DetectorConfig {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn detect(&self, input: &TrialInput<'_, T>) -> Result<TrialDetection> {
        let prior = self.kind.is_map().then_some(input.prior);
        let out = run_detector(input.sigma_hat, input.pilots, input.system, self, prior)?;
        Ok(TrialDetection {
            soft: out.soft.iter().map(|a| a.to_f64_lossy()).collect(),
            sweeps: out.sweeps,
        })
    }
}

/// Aggregated results of one experiment cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub detector: String,
    pub n_devices: usize,
    pub n_subcarriers: usize,
    pub n_antennas: usize,
    pub n_taps: usize,
    /// Activity probability of the prior, `NaN` for an explicit MVB prior.
    pub q: f64,
    pub group_size: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    pub error_rate: f64,
    pub miss_rate: f64,
    pub false_alarm_rate: f64,
    pub avg_sweeps: f64,
    /// Mean wall-clock detector time per trial. Not reproducible.
    pub avg_runtime_ms: f64,
    /// Trials lost to ill-conditioning and left out of the rates.
    pub failures: usize,
    pub errors: u64,
    pub misses: u64,
    pub false_alarms: u64,
}

impl MetricRow {
    /// Equality of everything except the wall-clock runtime, with `NaN`
    /// fields comparing equal.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.avg_runtime_ms = other.avg_runtime_ms;
        if a.q.to_bits() == other.q.to_bits() {
            a.q = other.q;
            return MetricRow { q: 0.0, ..a } == MetricRow { q: 0.0, ..other.clone() };
        }
        false
    }
}

impl fmt::Display for MetricRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} N={} L={} M={} P={} q={} trials={} threshold={:.2} error={:.5} miss={:.5} fa={:.5} sweeps={:.2} ms={:.2}",
            self.detector,
            self.n_devices,
            self.n_subcarriers,
            self.n_antennas,
            self.n_taps,
            self.q,
            self.trials,
            self.threshold,
            self.error_rate,
            self.miss_rate,
            self.false_alarm_rate,
            self.avg_sweeps,
            self.avg_runtime_ms
        )
    }
}

/// Soft output and ground truth of one completed trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub soft: Vec<f64>,
    pub truth: Vec<bool>,
    pub sweeps: usize,
    pub runtime_ms: f64,
}

/// Outcomes of a batch of trials, in trial order.
#[derive(Clone, Debug)]
pub struct TrialBatch {
    pub outcomes: Vec<TrialOutcome>,
    pub failures: usize,
}

fn shared_pilots<T: Real>(spec: &ExperimentSpec<T>) -> Result<Option<PilotSet<T>>> {
    if let Some(p) = &spec.pilots {
        return Ok(Some(p.clone()));
    }
    if !spec.shared_pilots {
        return Ok(None);
    }
    let key = rng::trial_key(spec.seed, Domain::Evaluation, spec.cell_id(), u64::MAX);
    generate_pilots_with(&spec.system, &mut rng::stream(key, Purpose::Pilot)).map(Some)
}

fn run_trial<T: Real>(
    spec: &ExperimentSpec<T>,
    detector: &dyn TrialDetector<T>,
    shared: Option<&PilotSet<T>>,
    domain: Domain,
    trial: usize,
) -> Result<TrialOutcome> {
    let key = rng::trial_key(spec.seed, domain, spec.cell_id(), trial as u64);
    let cfg = &spec.system;
    let drawn;
    let pilots = match shared {
        Some(p) => p,
        None => {
            drawn = generate_pilots_with(cfg, &mut rng::stream(key, Purpose::Pilot))?;
            &drawn
        }
    };
    let truth = spec.prior.sample(cfg.n_devices, &mut rng::stream(key, Purpose::Activity))?;
    let real = ChannelRealization::draw(cfg, truth.clone(), &mut rng::stream(key, Purpose::Channel))?;
    let r = synthesize_received(cfg, pilots, &real, &mut rng::stream(key, Purpose::Noise))?;
    let sigma_hat = sample_covariance(&r)?;
    let input = TrialInput {
        sigma_hat: &sigma_hat,
        pilots,
        system: cfg,
        prior: &spec.prior,
        truth: &truth,
    };
    let start = Instant::now();
    let det = detector.detect(&input)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    if det.soft.len() != cfg.n_devices {
        return Err(Error::Experiment(format!(
            "detector {} returned {} activities for {} devices",
            detector.name(),
            det.soft.len(),
            cfg.n_devices
        )));
    }
    Ok(TrialOutcome {
        soft: det.soft,
        truth,
        sweeps: det.sweeps,
        runtime_ms,
    })
}

/// Runs `count` trials of `domain` on a pool of `threads` workers (`0` for
/// the default). Ill-conditioned trials are counted; more than
/// [`MAX_FAILURE_FRACTION`] of them is an error, as is any other failure.
pub fn run_trials<T: Real>(
    spec: &ExperimentSpec<T>,
    detector: &dyn TrialDetector<T>,
    domain: Domain,
    count: usize,
    threads: usize,
) -> Result<TrialBatch> {
    spec.validate()?;
    let shared = shared_pilots(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Experiment(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<TrialOutcome>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|t| run_trial(spec, detector, shared.as_ref(), domain, t))
            .collect()
    });
    let mut outcomes = Vec::with_capacity(count);
    let mut failures = 0;
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(Error::Conditioning { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if failures as f64 > MAX_FAILURE_FRACTION * count as f64 {
        return Err(Error::Experiment(format!(
            "{failures} of {count} trials failed to stay well conditioned"
        )));
    }
    Ok(TrialBatch { outcomes, failures })
}

/// Misses and false alarms of one trial at threshold `theta`.
pub fn count_errors(soft: &[f64], truth: &[bool], theta: f64) -> (u64, u64) {
    let mut miss = 0;
    let mut fa = 0;
    for (&s, &t) in soft.iter().zip(truth) {
        match (s > theta, t) {
            (false, true) => miss += 1,
            (true, false) => fa += 1,
            _ => {}
        }
    }
    (miss, fa)
}

/// Threshold on the grid `0.00..=1.00` with the fewest errors over the
/// given outcomes; ties go to the smallest threshold.
pub fn optimal_threshold(outcomes: &[TrialOutcome]) -> f64 {
    let mut best = (u64::MAX, 0.0);
    for k in 0..=THRESHOLD_GRID {
        let theta = k as f64 / THRESHOLD_GRID as f64;
        let errors: u64 = outcomes
            .iter()
            .map(|o| {
                let (m, f) = count_errors(&o.soft, &o.truth, theta);
                m + f
            })
            .sum();
        if errors < best.0 {
            best = (errors, theta);
        }
    }
    best.1
}

/// Threshold calibrated on the spec's calibration trials, which use streams
/// disjoint from the evaluation trials.
pub fn calibrate_threshold<T: Real>(
    spec: &ExperimentSpec<T>,
    detector: &dyn TrialDetector<T>,
    threads: usize,
) -> Result<f64> {
    if spec.calibration_trials == 0 {
        return Err(Error::InvalidConfig("calibration_trials must be at least 1".into()));
    }
    let batch = run_trials(spec, detector, Domain::Calibration, spec.calibration_trials, threads)?;
    Ok(optimal_threshold(&batch.outcomes))
}

/// Aggregates a batch at a fixed threshold.
pub fn summarize<T: Real>(spec: &ExperimentSpec<T>, name: String, batch: &TrialBatch, theta: f64) -> MetricRow {
    let mut misses = 0;
    let mut false_alarms = 0;
    let mut sweeps = 0usize;
    let mut runtime = 0.0;
    for o in &batch.outcomes {
        let (m, f) = count_errors(&o.soft, &o.truth, theta);
        misses += m;
        false_alarms += f;
        sweeps += o.sweeps;
        runtime += o.runtime_ms;
    }
    let done = batch.outcomes.len();
    let slots = (spec.system.n_devices * done) as f64;
    let per = |c: u64| if done == 0 { 0.0 } else { c as f64 / slots };
    let mean = |x: f64| if done == 0 { 0.0 } else { x / done as f64 };
    MetricRow {
        detector: name,
        n_devices: spec.system.n_devices,
        n_subcarriers: spec.system.n_subcarriers,
        n_antennas: spec.system.n_antennas,
        n_taps: spec.system.n_taps,
        q: spec.prior.activity_probability().unwrap_or(f64::NAN),
        group_size: spec.group_size,
        trials: spec.trials,
        seed: spec.seed,
        threshold: theta,
        error_rate: per(misses + false_alarms),
        miss_rate: per(misses),
        false_alarm_rate: per(false_alarms),
        avg_sweeps: mean(sweeps as f64),
        avg_runtime_ms: mean(runtime),
        failures: batch.failures,
        errors: misses + false_alarms,
        misses,
        false_alarms,
    }
}

/// Runs one cell with an arbitrary detector.
pub fn run_experiment_with<T: Real>(
    spec: &ExperimentSpec<T>,
    detector: &dyn TrialDetector<T>,
    threads: usize,
) -> Result<MetricRow> {
    spec.validate()?;
    let theta = match spec.threshold {
        ThresholdRule::Fixed(t) => t,
        ThresholdRule::Calibrate => calibrate_threshold(spec, detector, threads)?,
    };
    let batch = run_trials(spec, detector, Domain::Evaluation, spec.trials, threads)?;
    Ok(summarize(spec, detector.name(), &batch, theta))
}

/// Runs one cell with the spec's detector.
pub fn run_experiment<T: Real>(spec: &ExperimentSpec<T>, threads: usize) -> Result<MetricRow> {
    run_experiment_with(spec, &spec.detector, threads)
}

/// Parameter varied by a sweep, with its values.
#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Taps(Vec<usize>),
    Subcarriers(Vec<usize>),
    Antennas(Vec<usize>),
    ActivityProbability(Vec<f64>),
    /// Contiguous equal groups of this size; needs a group prior.
    GroupSize(Vec<usize>),
    Detector(Vec<DetectorKind>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Self::Taps(v) | Self::Subcarriers(v) | Self::Antennas(v) | Self::GroupSize(v) => v.len(),
            Self::ActivityProbability(v) => v.len(),
            Self::Detector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The spec of cell `k`.
    pub fn cell<T: Real>(&self, base: &ExperimentSpec<T>, k: usize) -> Result<ExperimentSpec<T>> {
        let mut spec = base.clone();
        let dims_changed = matches!(self, Self::Taps(_) | Self::Subcarriers(_));
        match self {
            Self::Taps(v) => spec.system.n_taps = v[k],
            Self::Subcarriers(v) => spec.system.n_subcarriers = v[k],
            Self::Antennas(v) => spec.system.n_antennas = v[k],
            Self::ActivityProbability(v) => {
                spec.prior = match &base.prior {
                    PriorModel::Iid { .. } => PriorModel::iid(v[k])?,
                    PriorModel::Group { groups, epsilon, .. } => {
                        PriorModel::group(base.system.n_devices, groups.clone(), v[k], *epsilon)?
                    }
                    PriorModel::Mvb(_) => {
                        return Err(Error::InvalidConfig("an explicit MVB prior has no activity probability to sweep".into()))
                    }
                }
            }
            Self::GroupSize(v) => {
                let PriorModel::Group { q, epsilon, .. } = &base.prior else {
                    return Err(Error::InvalidConfig("a group-size sweep needs a group prior".into()));
                };
                let n = base.system.n_devices;
                if v[k] == 0 || !n.is_multiple_of(v[k]) {
                    return Err(Error::InvalidConfig(format!("group size {} does not divide {n} devices", v[k])));
                }
                spec.prior = PriorModel::group_contiguous(n, n / v[k], *q, *epsilon)?;
                spec.group_size = Some(v[k]);
            }
            Self::Detector(v) => spec.detector.kind = v[k],
        }
        if dims_changed && spec.pilots.is_some() {
            return Err(Error::InvalidConfig("fixed pilots cannot follow a change of L or P".into()));
        }
        Ok(spec)
    }
}

/// One row per sweep value.
pub fn sweep<T: Real>(base: &ExperimentSpec<T>, sweep: &Sweep, threads: usize) -> Result<Vec<MetricRow>> {
    if sweep.is_empty() {
        return Err(Error::InvalidConfig("sweep has no values".into()));
    }
    (0..sweep.len())
        .map(|k| run_experiment(&sweep.cell(base, k)?, threads))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oracle;
    impl TrialDetector<f64> for Oracle {
        fn name(&self) -> String {
            "oracle".into()
        }
        fn detect(&self, input: &TrialInput<'_, f64>) -> Result<TrialDetection> {
            Ok(TrialDetection {
                soft: input.truth.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect(),
                sweeps: 0,
            })
        }
    }

    struct Silent;
    impl TrialDetector<f64> for Silent {
        fn name(&self) -> String {
            "silent".into()
        }
        fn detect(&self, input: &TrialInput<'_, f64>) -> Result<TrialDetection> {
            Ok(TrialDetection {
                soft: vec![0.0; input.truth.len()],
                sweeps: 0,
            })
        }
    }

    /// Fails every `k`-th call with a conditioning error.
    struct Flaky(usize);
    impl TrialDetector<f64> for Flaky {
        fn name(&self) -> String {
            "flaky".into()
        }
        fn detect(&self, input: &TrialInput<'_, f64>) -> Result<TrialDetection> {
            // The first pilot entry is a deterministic function of the trial.
            let x = input.pilots.frequency()[(0, 0)].re.to_bits() as usize;
            if x % self.0 == 0 {
                return Err(Error::Conditioning {
                    reason: "stub".into(),
                    sweeps: 0,
                    last_soft: vec![],
                });
            }
            Silent.detect(input)
        }
    }

    fn spec(n: usize, q: f64, trials: usize) -> ExperimentSpec<f64> {
        let sys = SystemConfig::new(n, 8, 4, 2, 0.1).unwrap();
        let mut s = ExperimentSpec::new(
            sys,
            PriorModel::iid(q).unwrap(),
            DetectorConfig::new(DetectorKind::MlAct),
            trials,
            42,
        );
        s.threshold = ThresholdRule::Fixed(0.5);
        s
    }

    fn outcome(soft: &[f64], truth: &[bool]) -> TrialOutcome {
        TrialOutcome {
            soft: soft.to_vec(),
            truth: truth.to_vec(),
            sweeps: 0,
            runtime_ms: 0.0,
        }
    }

    #[test]
    fn oracle_has_no_errors() {
        let row = run_experiment_with(&spec(20, 0.2, 30), &Oracle, 1).unwrap();
        assert_eq!(row.error_rate, 0.0);
        assert_eq!(row.errors, 0);
    }

    #[test]
    fn silent_detector_misses_every_active_device() {
        let s = spec(100, 0.07, 100);
        let row = run_experiment_with(&s, &Silent, 1).unwrap();
        // Binomial standard deviation of the rate over 10^4 slots is 0.00255.
        assert!((row.error_rate - 0.07).abs() < 0.008, "{}", row.error_rate);
        assert_eq!(row.false_alarm_rate, 0.0);
        assert_eq!(row.error_rate, row.miss_rate);
        assert_eq!(row.errors as f64, (row.error_rate * 1e4).round());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut s = spec(12, 0.2, 6);
        s.threshold = ThresholdRule::Calibrate;
        s.calibration_trials = 4;
        let a = run_experiment(&s, 1).unwrap();
        let b = run_experiment(&s, 3).unwrap();
        assert!(a.same_outcome(&b), "{a:?} vs {b:?}");
    }

    #[test]
    fn optimal_threshold_tie_rules() {
        // Separable: every theta in [0.05, 0.9) is error free (strict `>`).
        let sep = vec![outcome(&[0.9, 0.05, 0.9, 0.05], &[true, false, true, false])];
        assert_eq!(optimal_threshold(&sep), 0.05);
        let sep = vec![outcome(&[0.9, 0.055, 0.9], &[true, false, true])];
        assert_eq!(optimal_threshold(&sep), 0.06);
        // All-zero softs: every theta gives the same misses.
        let zero = vec![outcome(&[0.0, 0.0, 0.0], &[true, false, false])];
        assert_eq!(optimal_threshold(&zero), 0.0);
    }

    #[test]
    fn optimal_threshold_matches_exhaustive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let outs: Vec<_> = (0..5)
                .map(|_| {
                    let truth: Vec<bool> = (0..10).map(|_| rng.random::<f64>() < 0.3).collect();
                    let soft: Vec<f64> = truth
                        .iter()
                        .map(|&t| (rng.random::<f64>() * 0.6 + if t { 0.4 } else { 0.0 }).min(1.0))
                        .collect();
                    outcome(&soft, &truth)
                })
                .collect();
            // Independent scan: count errors per grid point, keep the first minimum.
            let counts: Vec<usize> = (0..=100)
                .map(|k| {
                    let th = k as f64 / 100.0;
                    outs.iter()
                        .flat_map(|o| o.soft.iter().zip(&o.truth))
                        .filter(|(s, t)| (**s > th) != **t)
                        .count()
                })
                .collect();
            let min = *counts.iter().min().unwrap();
            let first = counts.iter().position(|&c| c == min).unwrap();
            assert_eq!(optimal_threshold(&outs), first as f64 / 100.0);
        }
    }

    #[test]
    fn calibration_and_evaluation_use_different_streams() {
        let s = spec(10, 0.3, 5);
        let eval = run_trials(&s, &Oracle, Domain::Evaluation, 5, 1).unwrap();
        let cal = run_trials(&s, &Oracle, Domain::Calibration, 5, 1).unwrap();
        let same = eval.outcomes.iter().zip(&cal.outcomes).filter(|(a, b)| a.truth == b.truth).count();
        assert!(same < 5);
    }

    #[test]
    fn failures_are_counted_and_capped() {
        let s = spec(6, 0.2, 200);
        let batch = run_trials(&s, &Flaky(1), Domain::Evaluation, 200, 1);
        assert!(matches!(batch, Err(Error::Experiment(_))));
        let batch = run_trials(&s, &Flaky(usize::MAX), Domain::Evaluation, 200, 1).unwrap();
        assert_eq!(batch.failures, 0);
        assert_eq!(batch.outcomes.len(), 200);
    }

    #[test]
    fn sweep_rows_follow_values() {
        let mut base = spec(8, 0.2, 1);
        base.prior = PriorModel::group_contiguous(8, 4, 0.2, 1e-3).unwrap();
        let rows = sweep(&base, &Sweep::Detector(vec![DetectorKind::MlAct, DetectorKind::MlVirtRel]), 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].detector, "ml-virt-rel");
        let rows = sweep(&base, &Sweep::GroupSize(vec![2, 4]), 1).unwrap();
        assert_eq!(rows[1].group_size, Some(4));
        assert!(sweep(&base, &Sweep::GroupSize(vec![3]), 1).is_err());
        let rows = sweep(&base, &Sweep::Taps(vec![1, 3]), 1).unwrap();
        assert_eq!(rows[1].n_taps, 3);
        assert!(sweep(&base, &Sweep::Antennas(vec![]), 1).is_err());
    }

    #[test]
    fn detectors_share_realizations_within_a_scenario() {
        let a = spec(10, 0.2, 3);
        let mut b = a.clone();
        b.detector.kind = DetectorKind::MapVirtRel;
        assert_eq!(a.cell_id(), b.cell_id());
        let mut c = a.clone();
        c.system.n_antennas = 8;
        assert_ne!(a.cell_id(), c.cell_id());
    }
}
