//! Invariant checks shared by the acceptance suite and the CLI self-test.
//!
//! Each check draws its own random instances from a fixed seed, compares the
//! implementation against an independent oracle and reports the worst
//! deviation it saw. Counts are parameters so the same code serves a quick
//! self-test and the full acceptance run.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detect::{
    coord_update_map_actual, coord_update_map_virtual_penalty, coord_update_map_virtual_relaxed,
    coord_update_ml_actual, coord_update_ml_virtual_penalty, coord_update_ml_virtual_relaxed, run_detector,
    Detector, DetectorConfig, DetectorKind,
};
use crate::error::Result;
use crate::numeric::{hpd_inverse, woodbury_downdate};
use crate::prior::{group_coefficients, log_probabilities, state_vector, MvbCoefficients, MvbTerm, PriorModel};
use crate::rng::{self, Purpose};
use crate::signal::{
    covariance_actual, covariance_virtual, draw_noise, generate_pilots, received_actual, received_virtual,
    sample_covariance, synthesize_received, ChannelRealization, PilotSet, SampleCovariance, SystemConfig,
};

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({}) [{:.2}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn finish(name: &'static str, start: Instant, outcome: Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// One observation with its ground truth.
pub struct Instance {
    pub cfg: SystemConfig<f64>,
    pub pilots: PilotSet<f64>,
    pub sigma_hat: SampleCovariance<f64>,
    pub truth: Vec<bool>,
}

/// Draws pilots, activities from `prior`, channels and noise from `seed`.
pub fn random_instance(cfg: SystemConfig<f64>, prior: &PriorModel, seed: u64) -> Result<Instance> {
    let pilots = generate_pilots(&cfg, seed)?;
    let truth = prior.sample(cfg.n_devices, &mut rng::seeded(seed, Purpose::Activity))?;
    let real = ChannelRealization::draw(&cfg, truth.clone(), &mut rng::seeded(seed, Purpose::Channel))?;
    let r = synthesize_received(&cfg, &pilots, &real, &mut rng::seeded(seed, Purpose::Noise))?;
    let sigma_hat = sample_covariance(&r)?;
    Ok(Instance {
        cfg,
        pilots,
        sigma_hat,
        truth,
    })
}

/// Soft activity vector with some entries at the box ends.
fn random_activities(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect()
}

/// Small instance with `P` taps and random activities, for coordinate checks.
fn small_instance(p: usize, rng: &mut impl Rng) -> Result<Instance> {
    let n = rng.random_range(3..=6);
    let l = rng.random_range((2 * p).max(4)..=12);
    let m = rng.random_range(2..=16);
    let cfg = SystemConfig::new(n, l, m, p, 0.1)?;
    random_instance(cfg, &PriorModel::iid(0.4)?, rng.random())
}

/// Actual and virtual signal models agree on received signals and on the
/// covariance for consistent activities.
pub fn model_equivalence(instances: usize, seed: u64, fault: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..instances {
            let p = rng.random_range(1..=4);
            let n = rng.random_range(1..=8);
            let l = rng.random_range((p + 1).max(2)..=16);
            let m = rng.random_range(1..=6);
            let cfg = SystemConfig::new(n, l, m, p, 0.1)?;
            let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            let cfg = cfg.with_gains(gains)?;
            let pilots = generate_pilots(&cfg, rng.random())?;
            let truth: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let real = ChannelRealization::draw(&cfg, truth, &mut rng)?;
            let noise = draw_noise(l, m, cfg.noise_var, &mut rng);
            let ra = received_actual(&cfg, &pilots, &real, &noise)?;
            let mut rv = received_virtual(&cfg, &pilots, &real, &noise)?;
            if fault {
                rv[(0, 0)].re += 1e-6;
            }
            worst = worst.max(ra.max_abs_diff(&rv));
            let alpha = random_activities(n, &mut rng);
            let beta: Vec<f64> = alpha.iter().flat_map(|&a| std::iter::repeat_n(a, p)).collect();
            let sa = covariance_actual(&cfg, &pilots, &alpha)?;
            let sv = covariance_virtual(&cfg, &pilots, &beta)?;
            worst = worst.max(sa.max_abs_diff(&sv));
        }
        Ok((worst <= 1e-12, format!("{instances} instances, max deviation {worst:.2e}")))
    })();
    finish("model-equivalence", start, outcome)
}

/// Central difference with step `1e-6`.
fn central_difference(f: impl Fn(f64) -> f64, d: f64) -> f64 {
    let h = 1e-6;
    (f(d + h) - f(d - h)) / (2.0 * h)
}

/// Analytic coordinate derivatives of all four objective families match
/// central differences, and each derivative times its denominator equals
/// the derivative numerator polynomial.
pub fn derivative_oracle(instances: usize, points: usize, seed: u64, fault: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_fd: f64 = 0.0;
        let mut worst_poly: f64 = 0.0;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let perturb = if fault { 1.0 + 1e-4 } else { 1.0 };
        for k in 0..instances {
            let p = 1 + k % 4;
            let inst = small_instance(p, &mut rng)?;
            let prior = PriorModel::group_contiguous(inst.cfg.n_devices, 1, 0.3, 1e-3)?;
            for kind in [DetectorKind::MlAct, DetectorKind::MapAct] {
                let mut det = Detector::new(&inst.cfg, &inst.pilots, &inst.sigma_hat, Some(&prior), DetectorConfig::new(kind))?;
                det.set_activities(random_activities(inst.cfg.n_devices, &mut rng))?;
                let n = rng.random_range(0..inst.cfg.n_devices);
                let cp = det.actual_coordinate(n, kind.is_map())?;
                let num = cp.numerator();
                for _ in 0..points {
                    let d = cp.lo + (cp.hi - cp.lo) * rng.random_range(0.05..0.95);
                    let g = cp.derivative(d) * perturb;
                    worst_fd = worst_fd.max(rel(central_difference(|x| cp.objective(x), d), g));
                    worst_poly = worst_poly.max(rel(num.eval(d), g * cp.denominator(d)));
                }
            }
            for kind in [DetectorKind::MlVirtPen, DetectorKind::MapVirtPen] {
                let mut det = Detector::new(&inst.cfg, &inst.pilots, &inst.sigma_hat, Some(&prior), DetectorConfig::new(kind))?;
                det.set_activities(random_activities(inst.cfg.n_virtual(), &mut rng))?;
                let i = rng.random_range(0..inst.cfg.n_virtual());
                let rho = rng.random_range(0.1..20.0);
                let cp = det.virtual_coordinate(i, rho, kind.is_map())?;
                let num = cp.numerator();
                for _ in 0..points {
                    let d = cp.lo + (cp.hi - cp.lo) * rng.random_range(0.05..0.95);
                    let g = cp.derivative(d) * perturb;
                    worst_fd = worst_fd.max(rel(central_difference(|x| cp.objective(x), d), g));
                    worst_poly = worst_poly.max(rel(num.eval(d), g * cp.denominator(d)));
                }
            }
        }
        Ok((
            worst_fd < 1e-6 && worst_poly < 1e-9,
            format!(
                "{instances} instances x 4 families x {points} points, max relative error {worst_fd:.2e} (difference), {worst_poly:.2e} (numerator)"
            ),
        ))
    })();
    finish("derivative-oracle", start, outcome)
}

/// Objective of the coordinate problem behind `kind` at coordinate `j`,
/// and the step the detector's update rule takes there.
fn step_and_objective(det: &Detector<'_, f64>, kind: DetectorKind, j: usize, rho: f64) -> Result<(f64, Box<dyn Fn(f64) -> f64>, f64, f64)> {
    let map = kind.is_map();
    if kind.is_virtual() {
        let r = if kind.is_penalized() { rho } else { 0.0 };
        let cp = det.virtual_coordinate(j, r, map)?;
        let d = match kind {
            DetectorKind::MlVirtPen => coord_update_ml_virtual_penalty(det, j, rho)?,
            DetectorKind::MapVirtPen => coord_update_map_virtual_penalty(det, j, rho)?,
            DetectorKind::MlVirtRel => coord_update_ml_virtual_relaxed(det, j)?,
            _ => coord_update_map_virtual_relaxed(det, j)?,
        };
        let (lo, hi) = (cp.lo, cp.hi);
        Ok((d, Box::new(move |x| cp.objective(x)), lo, hi))
    } else {
        let cp = det.actual_coordinate(j, map)?;
        let d = if map { coord_update_map_actual(det, j)? } else { coord_update_ml_actual(det, j)? };
        let (lo, hi) = (cp.lo, cp.hi);
        Ok((d, Box::new(move |x| cp.objective(x)), lo, hi))
    }
}

/// Every coordinate update is at least as good as the best point of a
/// `10^4`-point grid over its box, for every detector kind.
pub fn grid_oracle(problems_per_kind: usize, seed: u64, fault: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = 10_000;
        let mut worst: f64 = f64::NEG_INFINITY;
        let mut worst_kind = DetectorKind::MlAct;
        for kind in DetectorKind::PROPOSED {
            for k in 0..problems_per_kind {
                let p = 1 + k % 4;
                let inst = small_instance(p, &mut rng)?;
                let prior = match k % 3 {
                    0 => PriorModel::iid(rng.random_range(0.01..0.6))?,
                    1 => PriorModel::group_contiguous(inst.cfg.n_devices, 1, rng.random_range(0.01..0.6), 1e-3)?,
                    _ => PriorModel::iid(rng.random_range(0.5..0.99))?,
                };
                let mut config = DetectorConfig::new(kind);
                config.rho = rng.random_range(0.1..50.0);
                let mut det = Detector::new(&inst.cfg, &inst.pilots, &inst.sigma_hat, Some(&prior), config.clone())?;
                let dim = det.state().activities.len();
                det.set_activities(random_activities(dim, &mut rng))?;
                let j = rng.random_range(0..dim);
                let (mut d, f, lo, hi) = step_and_objective(&det, kind, j, config.rho)?;
                if fault {
                    d = (d + 0.25 * (hi - lo)).min(hi);
                    if d == hi {
                        d = lo;
                    }
                }
                let best = (0..=grid)
                    .map(|g| f(lo + (hi - lo) * g as f64 / grid as f64))
                    .fold(f64::INFINITY, f64::min);
                let excess = f(d) - best;
                if excess > worst {
                    worst = excess;
                    worst_kind = kind;
                }
            }
        }
        Ok((
            worst <= 1e-8,
            format!("{problems_per_kind} problems x 6 kinds, worst excess over grid {worst:.2e} ({worst_kind})"),
        ))
    })();
    finish("grid-oracle", start, outcome)
}

/// Summary of full detector runs.
#[derive(Clone, Debug, Default)]
pub struct DescentSummary {
    pub runs: usize,
    /// Largest increase between consecutive exact per-sweep objectives.
    pub worst_sweep_increase: f64,
    /// Largest increase between consecutive tracked per-step objectives.
    pub worst_step_increase: f64,
    /// Largest end-of-run `max |maintained - direct|` inverse deviation.
    pub worst_drift: f64,
}

impl DescentSummary {
    fn absorb(&mut self, trace: &[f64], steps: &[f64], drift: f64) {
        self.runs += 1;
        for w in trace.windows(2) {
            self.worst_sweep_increase = self.worst_sweep_increase.max(w[1] - w[0]);
        }
        for w in steps.windows(2) {
            self.worst_step_increase = self.worst_step_increase.max(w[1] - w[0]);
        }
        self.worst_drift = self.worst_drift.max(drift);
    }
}

/// Desk-scale system used by the descent check.
pub fn desk_system() -> Result<SystemConfig<f64>> {
    SystemConfig::new(100, 24, 32, 2, 0.1)
}

/// Runs every proposed detector on `instances` random desk-scale
/// observations and records traces and inverse drift.
pub fn descent_runs(system: &SystemConfig<f64>, instances: usize, seed: u64) -> Result<DescentSummary> {
    let prior = PriorModel::iid(0.05)?;
    let mut summary = DescentSummary::default();
    for k in 0..instances {
        let inst = random_instance(system.clone(), &prior, seed.wrapping_add(k as u64))?;
        for kind in DetectorKind::PROPOSED {
            let mut config = DetectorConfig::new(kind);
            config.record_steps = true;
            let prior = kind.is_map().then_some(&prior);
            let out = run_detector(&inst.sigma_hat, &inst.pilots, &inst.cfg, &config, prior)?;
            summary.absorb(&out.objective_trace, &out.step_trace, out.inverse_drift);
        }
    }
    Ok(summary)
}

/// Objective traces never increase.
pub fn monotone_descent(summary: &DescentSummary, fault: bool) -> CheckResult {
    let start = Instant::now();
    let worst = summary.worst_sweep_increase.max(summary.worst_step_increase) + if fault { 1.0 } else { 0.0 };
    finish(
        "monotone-descent",
        start,
        Ok((
            worst <= 1e-9,
            format!("{} runs, largest increase {worst:.2e}", summary.runs),
        )),
    )
}

/// Summary of single-tap comparisons.
#[derive(Clone, Debug, Default)]
pub struct CollapseSummary {
    pub instances: usize,
    pub worst_ml: f64,
    pub worst_map: f64,
    pub worst_drift: f64,
}

/// With one tap, the actual-device and relaxed virtual-device detectors
/// solve the same problem and must agree.
pub fn collapse_runs(instances: usize, seed: u64) -> Result<CollapseSummary> {
    let prior = PriorModel::iid(0.05)?;
    let system = SystemConfig::new(100, 24, 32, 1, 0.1)?;
    let mut s = CollapseSummary::default();
    for k in 0..instances {
        let inst = random_instance(system.clone(), &prior, seed.wrapping_add(k as u64))?;
        let run = |kind: DetectorKind| {
            let p = kind.is_map().then_some(&prior);
            run_detector(&inst.sigma_hat, &inst.pilots, &inst.cfg, &DetectorConfig::new(kind), p)
        };
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let (a, b) = (run(DetectorKind::MlAct)?, run(DetectorKind::MlVirtRel)?);
        s.worst_ml = s.worst_ml.max(diff(&a.soft, &b.soft));
        let (c, d) = (run(DetectorKind::MapAct)?, run(DetectorKind::MapVirtRel)?);
        s.worst_map = s.worst_map.max(diff(&c.soft, &d.soft));
        for out in [&a, &b, &c, &d] {
            s.worst_drift = s.worst_drift.max(out.inverse_drift);
        }
        s.instances += 1;
    }
    Ok(s)
}

pub fn single_tap_collapse(summary: &CollapseSummary, fault: bool) -> CheckResult {
    let start = Instant::now();
    let worst = summary.worst_ml.max(summary.worst_map) + if fault { 1.0 } else { 0.0 };
    finish(
        "single-tap-collapse",
        start,
        Ok((
            worst <= 1e-9,
            format!(
                "{} instances, max soft difference {:.2e} (ML), {:.2e} (MAP)",
                summary.instances, summary.worst_ml, summary.worst_map
            ),
        )),
    )
}

pub fn woodbury_drift(worst_drift: f64, runs: usize, fault: bool) -> CheckResult {
    let start = Instant::now();
    let worst = worst_drift + if fault { 1.0 } else { 0.0 };
    finish(
        "woodbury-drift",
        start,
        Ok((worst < 1e-8, format!("{runs} runs, max inverse deviation {worst:.2e}"))),
    )
}

/// Block rank updates agree with direct inversion on random matrices.
pub fn woodbury_identity(instances: usize, seed: u64, fault: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..instances {
            let p = rng.random_range(1..=4);
            let l = rng.random_range(p + 1..=16);
            let cfg = SystemConfig::new(3, l, 1, p, 0.1)?;
            let pilots = generate_pilots(&cfg, rng.random())?;
            let alpha = random_activities(3, &mut rng);
            let sigma = covariance_actual(&cfg, &pilots, &alpha)?;
            let inv = hpd_inverse(&sigma)?;
            let n = rng.random_range(0..3);
            let c = rng.random_range(-alpha[n]..=1.0 - alpha[n]);
            let mut updated = woodbury_downdate(&inv, pilots.block(n), c)?;
            if fault {
                updated = updated.scale(1.0 + 1e-6);
            }
            let mut alpha2 = alpha.clone();
            alpha2[n] += c;
            let direct = hpd_inverse(&covariance_actual(&cfg, &pilots, &alpha2)?)?;
            worst = worst.max(updated.max_abs_diff(&direct) / direct.max_abs().max(1.0));
        }
        Ok((worst < 1e-10, format!("{instances} updates, max relative deviation {worst:.2e}")))
    })();
    finish("woodbury-identity", start, outcome)
}

/// Sum of `exp(sum_omega c_omega prod alpha)` over all states, computed
/// directly from the terms.
fn brute_force_partition(coeffs: &MvbCoefficients) -> Vec<f64> {
    let n = coeffs.n_devices();
    (0..1usize << n)
        .map(|s| {
            coeffs
                .terms()
                .iter()
                .filter(|t| t.omega.iter().all(|&k| s >> k & 1 == 1))
                .map(|t| t.c)
                .sum::<f64>()
        })
        .collect()
}

/// Normalization, group marginals and the finite-difference identity of
/// the prior derivatives.
pub fn prior_correctness(seed: u64, fault: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Normalization of random MVB priors against a direct enumeration.
        let mut worst_norm: f64 = 0.0;
        for n in 1..=10 {
            let terms: Vec<MvbTerm> = (0..2 * n)
                .map(|_| {
                    let mut omega: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.4).collect();
                    if omega.is_empty() {
                        omega.push(rng.random_range(0..n));
                    }
                    MvbTerm {
                        omega,
                        c: rng.random_range(-2.0..2.0),
                    }
                })
                .collect();
            let coeffs = MvbCoefficients::new(n, terms)?;
            let prior = PriorModel::mvb(coeffs.clone())?;
            let lp = log_probabilities(&prior, n)?;
            let total: f64 = lp.iter().map(|x| x.exp()).sum();
            worst_norm = worst_norm.max((total - 1.0).abs());
            // Ratios against the brute-force exponents.
            let raw = brute_force_partition(&coeffs);
            let z: f64 = raw.iter().map(|x| x.exp()).sum();
            for (s, r) in raw.iter().enumerate() {
                worst_norm = worst_norm.max((lp[s].exp() - r.exp() / z).abs());
            }
        }
        // Group marginals at epsilon = 1e-3 by enumeration.
        let mut worst_marginal: f64 = 0.0;
        for size in 1..=3 {
            for q in [0.05, 0.3] {
                let n = size * (9 / size);
                let groups: Vec<Vec<usize>> = (0..n / size).map(|k| (k * size..(k + 1) * size).collect()).collect();
                let coeffs = group_coefficients(n, &groups, q, 1e-3)?;
                let lp = log_probabilities(&PriorModel::mvb(coeffs)?, n)?;
                // Probability that every member of the group is active.
                for g in &groups {
                    let mask: usize = g.iter().map(|&d| 1usize << d).sum();
                    let active: f64 = lp
                        .iter()
                        .enumerate()
                        .filter(|(s, _)| s & mask == mask)
                        .map(|(_, x)| x.exp())
                        .sum();
                    worst_marginal = worst_marginal.max((active - q).abs() / q);
                }
            }
        }
        // epsilon_n equals the exponent difference on binary vectors.
        let mut worst_eps: f64 = 0.0;
        let priors = [
            PriorModel::iid(0.07)?,
            PriorModel::group_contiguous(8, 2, 0.2, 1e-3)?,
            PriorModel::mvb(group_coefficients(8, &[vec![0, 3, 5], vec![1, 2, 4, 6, 7]], 0.1, 1e-2)?)?,
        ];
        for prior in &priors {
            for s in 0..256usize {
                let alpha = state_vector(s, 8);
                for n in 0..8 {
                    let mut on = alpha.clone();
                    on[n] = 1.0;
                    let mut off = alpha.clone();
                    off[n] = 0.0;
                    let diff = prior.log_pmf_unnormalized(&on) - prior.log_pmf_unnormalized(&off);
                    let mut eps = prior.epsilon_actual(n, &alpha);
                    if fault {
                        eps += 1e-3;
                    }
                    worst_eps = worst_eps.max((eps - diff).abs() / diff.abs().max(1.0));
                }
            }
        }
        Ok((
            worst_norm <= 1e-12 && worst_marginal < 0.01 && worst_eps <= 1e-12,
            format!(
                "normalization {worst_norm:.2e}, group activity relative error {worst_marginal:.2e}, epsilon identity {worst_eps:.2e}"
            ),
        ))
    })();
    finish("prior-correctness", start, outcome)
}

/// Names of the checks in the quick suite, in run order.
pub const QUICK_SUITE: [&str; 8] = [
    "model-equivalence",
    "derivative-oracle",
    "grid-oracle",
    "woodbury-identity",
    "monotone-descent",
    "woodbury-drift",
    "single-tap-collapse",
    "prior-correctness",
];

/// Reduced-count version of the acceptance checks. `fault` names a check
/// whose computation is deliberately perturbed, to prove the check can fail.
pub fn quick_suite(fault: Option<&str>) -> Vec<CheckResult> {
    let broken = |name: &str| fault == Some(name);
    let mut out = vec![
        model_equivalence(20, 1, broken("model-equivalence")),
        derivative_oracle(12, 5, 2, broken("derivative-oracle")),
        grid_oracle(20, 3, broken("grid-oracle")),
        woodbury_identity(50, 4, broken("woodbury-identity")),
    ];
    let small = SystemConfig::new(40, 16, 16, 2, 0.1);
    let descent = small.and_then(|s| descent_runs(&s, 3, 5));
    let collapse = collapse_runs(2, 6);
    match (&descent, &collapse) {
        (Ok(d), Ok(c)) => {
            out.push(monotone_descent(d, broken("monotone-descent")));
            out.push(woodbury_drift(d.worst_drift.max(c.worst_drift), d.runs + 4 * c.instances, broken("woodbury-drift")));
            out.push(single_tap_collapse(c, broken("single-tap-collapse")));
        }
        _ => {
            let detail = match (descent, collapse) {
                (Err(e), _) | (_, Err(e)) => format!("error: {e}"),
                _ => unreachable!(),
            };
            for name in ["monotone-descent", "woodbury-drift", "single-tap-collapse"] {
                out.push(CheckResult {
                    name,
                    passed: false,
                    detail: detail.clone(),
                    elapsed: Duration::ZERO,
                });
            }
        }
    }
    out.push(prior_correctness(7, broken("prior-correctness")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for r in quick_suite(None) {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn every_check_can_fail() {
        for name in QUICK_SUITE {
            let results = quick_suite(Some(name));
            let r = results.iter().find(|r| r.name == name).unwrap();
            assert!(!r.passed, "{name} did not notice the injected fault: {r}");
        }
    }

    #[test]
    fn random_instances_are_reproducible() {
        let cfg = SystemConfig::new(10, 8, 4, 2, 0.1).unwrap();
        let prior = PriorModel::iid(0.3).unwrap();
        let a = random_instance(cfg.clone(), &prior, 9).unwrap();
        let b = random_instance(cfg, &prior, 9).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.sigma_hat, b.sigma_hat);
    }
}
