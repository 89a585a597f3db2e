use super::*;
use crate::prior::PriorModel;
use crate::rng::{self, Purpose};
use crate::signal::{generate_pilots, sample_covariance, synthesize_received, ChannelRealization};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Scene {
    cfg: SystemConfig<f64>,
    pilots: PilotSet<f64>,
    sigma_hat: SampleCovariance<f64>,
    truth: Vec<bool>,
}

fn scene(n: usize, l: usize, m: usize, p: usize, active: &[usize], seed: u64) -> Scene {
    let cfg = SystemConfig::new(n, l, m, p, 0.1).unwrap();
    let pilots = generate_pilots(&cfg, seed).unwrap();
    let truth: Vec<bool> = (0..n).map(|k| active.contains(&k)).collect();
    let mut ch = rng::seeded(seed, Purpose::Channel);
    let real = ChannelRealization::draw(&cfg, truth.clone(), &mut ch).unwrap();
    let mut noise = rng::seeded(seed, Purpose::Noise);
    let r = synthesize_received(&cfg, &pilots, &real, &mut noise).unwrap();
    let sigma_hat = sample_covariance(&r).unwrap();
    Scene {
        cfg,
        pilots,
        sigma_hat,
        truth,
    }
}

fn random_activities(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect()
}

fn detector<'a>(s: &'a Scene, prior: Option<&'a PriorModel>, kind: DetectorKind) -> Detector<'a, f64> {
    Detector::new(&s.cfg, &s.pilots, &s.sigma_hat, prior, DetectorConfig::new(kind)).unwrap()
}

/// Brute-force minimum of `f` over a uniform grid of the box.
fn grid_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let k = 10_000;
    (0..=k)
        .map(|j| f(lo + (hi - lo) * j as f64 / k as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Full objective of each kind, evaluated from scratch.
fn full_objective(s: &Scene, prior: Option<&PriorModel>, kind: DetectorKind, act: &[f64], rho: f64) -> f64 {
    let mode = if kind.is_virtual() { ActivityMode::Virtual } else { ActivityMode::Actual };
    let mut f = ml_objective(&s.sigma_hat, &s.pilots, &s.cfg, act, mode).unwrap();
    if kind.is_penalized() {
        f += rho * penalty(act, s.cfg.n_taps);
    }
    if kind.is_map() {
        f -= prior_exponent(prior.unwrap(), act, mode, s.cfg.n_taps) / s.cfg.n_antennas as f64;
    }
    f
}

#[test]
fn kind_names_round_trip() {
    for k in DetectorKind::PROPOSED.into_iter().chain([DetectorKind::BlMlFlat]) {
        assert_eq!(k.as_str().parse::<DetectorKind>().unwrap(), k);
        assert_eq!(k.to_string(), k.as_str());
    }
    assert!("ml-virt".parse::<DetectorKind>().is_err());
}

#[test]
fn config_validation() {
    let iid = PriorModel::iid(0.1).unwrap();
    assert!(DetectorConfig::new(DetectorKind::MapAct).validate(None).is_err());
    assert!(DetectorConfig::new(DetectorKind::MapAct).validate(Some(&iid)).is_ok());
    let mut c = DetectorConfig::new(DetectorKind::MlVirtPen);
    c.rho = 0.0;
    assert!(c.validate(None).is_err());
    c.kind = DetectorKind::MlVirtRel;
    assert!(c.validate(None).is_ok());
    c.max_sweeps = 0;
    assert!(c.validate(None).is_err());
}

#[test]
fn actual_coordinate_matches_objective_difference() {
    let s = scene(5, 8, 16, 2, &[0, 3], 11);
    let prior = PriorModel::iid(0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in [DetectorKind::MlAct, DetectorKind::MapAct] {
        let mut det = detector(&s, Some(&prior), kind);
        for _ in 0..5 {
            let a = random_activities(5, &mut rng);
            det.set_activities(a.clone()).unwrap();
            for n in 0..5 {
                let cp = det.actual_coordinate(n, kind.is_map()).unwrap();
                let base = full_objective(&s, Some(&prior), kind, &a, 0.0);
                for d in [cp.lo, cp.hi, 0.5 * (cp.lo + cp.hi)] {
                    let mut b = a.clone();
                    b[n] += d;
                    let want = full_objective(&s, Some(&prior), kind, &b, 0.0) - base;
                    assert!((cp.objective(d) - want).abs() < 1e-9, "{kind} n={n} d={d}: {} vs {want}", cp.objective(d));
                }
            }
        }
    }
}

#[test]
fn virtual_coordinate_matches_objective_difference() {
    let s = scene(4, 8, 16, 3, &[1, 2], 12);
    let prior = PriorModel::group_contiguous(4, 2, 0.3, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = 10.0;
    for kind in [
        DetectorKind::MlVirtPen,
        DetectorKind::MlVirtRel,
        DetectorKind::MapVirtPen,
        DetectorKind::MapVirtRel,
    ] {
        let mut det = detector(&s, Some(&prior), kind);
        let r = if kind.is_penalized() { rho } else { 0.0 };
        for _ in 0..4 {
            let b = random_activities(12, &mut rng);
            det.set_activities(b.clone()).unwrap();
            let base = full_objective(&s, Some(&prior), kind, &b, r);
            for i in 0..12 {
                let cp = det.virtual_coordinate(i, r, kind.is_map()).unwrap();
                for d in [cp.lo, cp.hi, 0.3 * cp.lo + 0.7 * cp.hi] {
                    let mut c = b.clone();
                    c[i] += d;
                    let want = full_objective(&s, Some(&prior), kind, &c, r) - base;
                    assert!((cp.objective(d) - want).abs() < 1e-9, "{kind} i={i} d={d}");
                }
            }
        }
    }
}

#[test]
fn derivatives_and_numerators_match_finite_differences() {
    let s = scene(4, 8, 16, 3, &[0, 2], 13);
    let prior = PriorModel::iid(0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-6;
    let fd = |f: &dyn Fn(f64) -> f64, d: f64| (f(d + h) - f(d - h)) / (2.0 * h);

    for kind in [DetectorKind::MlAct, DetectorKind::MapAct] {
        let mut det = detector(&s, Some(&prior), kind);
        det.set_activities(random_activities(4, &mut rng)).unwrap();
        for n in 0..4 {
            let cp = det.actual_coordinate(n, kind.is_map()).unwrap();
            let num = cp.numerator();
            assert!(num.degree().unwrap_or(0) <= if kind.is_map() { 6 } else { 5 });
            for t in [0.1, 0.4, 0.8] {
                let d = cp.lo + t * (cp.hi - cp.lo);
                let g = cp.derivative(d);
                assert!((fd(&|x| cp.objective(x), d) - g).abs() < 1e-5 * (1.0 + g.abs()));
                let lhs = num.eval(d);
                let rhs = g * cp.denominator(d);
                assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()), "{kind}: {lhs} vs {rhs}");
            }
        }
    }
    for kind in [DetectorKind::MlVirtPen, DetectorKind::MapVirtPen] {
        let mut det = detector(&s, Some(&prior), kind);
        det.set_activities(random_activities(12, &mut rng)).unwrap();
        for i in 0..12 {
            let cp = det.virtual_coordinate(i, 7.5, kind.is_map()).unwrap();
            let num = cp.numerator();
            for t in [0.1, 0.4, 0.8] {
                let d = cp.lo + t * (cp.hi - cp.lo);
                let g = cp.derivative(d);
                assert!((fd(&|x| cp.objective(x), d) - g).abs() < 1e-5 * (1.0 + g.abs()));
                let rhs = g * cp.denominator(d);
                assert!((num.eval(d) - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));
            }
        }
    }
}

#[test]
fn coordinate_solutions_beat_a_fine_grid() {
    let prior = PriorModel::iid(0.15).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p, seed) in [(1, 21), (2, 22), (3, 23)] {
        let s = scene(4, 8, 12, p, &[0, 1], seed);
        for kind in DetectorKind::PROPOSED {
            let mut det = detector(&s, Some(&prior), kind);
            for _ in 0..3 {
                let dim = if kind.is_virtual() { 4 * p } else { 4 };
                det.set_activities(random_activities(dim, &mut rng)).unwrap();
                for j in 0..dim {
                    if kind.is_virtual() {
                        let r = if kind.is_penalized() { 10.0 } else { 0.0 };
                        let cp = det.virtual_coordinate(j, r, kind.is_map()).unwrap();
                        let d = match kind {
                            DetectorKind::MlVirtRel => cp.solve_relaxed_ml(),
                            DetectorKind::MapVirtRel => cp.solve_relaxed_map(),
                            _ => cp.solve_penalized().d,
                        };
                        assert!(d >= cp.lo && d <= cp.hi);
                        let best = grid_min(cp.lo, cp.hi, |x| cp.objective(x));
                        assert!(cp.objective(d) <= best + 1e-9, "{kind} j={j}: {} > {best}", cp.objective(d));
                    } else {
                        let cp = det.actual_coordinate(j, kind.is_map()).unwrap();
                        let d = cp.solve().d;
                        assert!(d >= cp.lo && d <= cp.hi);
                        let best = grid_min(cp.lo, cp.hi, |x| cp.objective(x));
                        assert!(cp.objective(d) <= best + 1e-9, "{kind} j={j}");
                    }
                }
            }
        }
    }
}

#[test]
fn free_update_functions_agree_with_coordinate_solvers() {
    let s = scene(4, 8, 16, 2, &[1], 31);
    let prior = PriorModel::iid(0.2).unwrap();
    let act = detector(&s, Some(&prior), DetectorKind::MapAct);
    assert_eq!(coord_update_ml_actual(&act, 1).unwrap(), act.actual_coordinate(1, false).unwrap().solve().d);
    assert_eq!(coord_update_map_actual(&act, 1).unwrap(), act.actual_coordinate(1, true).unwrap().solve().d);
    let virt = detector(&s, Some(&prior), DetectorKind::MapVirtPen);
    assert_eq!(
        coord_update_ml_virtual_penalty(&virt, 2, 10.0).unwrap(),
        virt.virtual_coordinate(2, 10.0, false).unwrap().solve_penalized().d
    );
    assert_eq!(
        coord_update_map_virtual_penalty(&virt, 2, 10.0).unwrap(),
        virt.virtual_coordinate(2, 10.0, true).unwrap().solve_penalized().d
    );
    assert_eq!(
        coord_update_ml_virtual_relaxed(&virt, 2).unwrap(),
        virt.virtual_coordinate(2, 0.0, false).unwrap().solve_relaxed_ml()
    );
    assert!(coord_update_map_virtual_relaxed(&virt, 2).unwrap() >= 0.0);
    // Wrong parametrization is rejected.
    assert!(coord_update_ml_actual(&virt, 0).is_err());
    assert!(coord_update_ml_virtual_relaxed(&act, 0).is_err());
}

#[test]
fn zero_penalty_reduces_to_the_relaxed_step() {
    let s = scene(4, 8, 16, 2, &[0, 3], 32);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut det = detector(&s, None, DetectorKind::MlVirtRel);
    for _ in 0..5 {
        det.set_activities(random_activities(8, &mut rng)).unwrap();
        for i in 0..8 {
            let cp = det.virtual_coordinate(i, 0.0, false).unwrap();
            let cubic = cp.solve_penalized().d;
            let closed = cp.solve_relaxed_ml();
            assert!(
                (cp.objective(cubic) - cp.objective(closed)).abs() < 1e-10,
                "{cubic} vs {closed}"
            );
        }
    }
}

#[test]
fn iid_closed_form_matches_general_relaxed_map() {
    let s = scene(4, 8, 16, 2, &[0, 3], 33);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for q in [0.01, 0.1, 0.3, 0.49] {
        let prior = PriorModel::iid(q).unwrap();
        let mut det = detector(&s, Some(&prior), DetectorKind::MapVirtRel);
        det.set_activities(random_activities(8, &mut rng)).unwrap();
        for i in 0..8 {
            let cp = det.virtual_coordinate(i, 0.0, true).unwrap();
            let lam = log_odds(q);
            assert!((cp.prior_slope - lam / (16.0 * 2.0)).abs() < 1e-14);
            let a = cp.solve_relaxed_map_iid(lam, 16, 2);
            let b = cp.solve_relaxed_map();
            assert!((a - b).abs() < 1e-12, "q={q}: {a} vs {b}");
        }
    }
}

#[test]
fn map_step_approaches_ml_as_prior_flattens() {
    let s = scene(4, 8, 16, 2, &[0, 3], 34);
    let prior = PriorModel::iid(0.5 - 1e-9).unwrap();
    let det = detector(&s, Some(&prior), DetectorKind::MapVirtRel);
    for i in 0..8 {
        let cp = det.virtual_coordinate(i, 0.0, true).unwrap();
        assert!((cp.solve_relaxed_map() - cp.solve_relaxed_ml()).abs() < 1e-6);
    }
    let det = detector(&s, Some(&prior), DetectorKind::MapAct);
    for n in 0..4 {
        let ml = det.actual_coordinate(n, false).unwrap().solve().d;
        let map = det.actual_coordinate(n, true).unwrap().solve().d;
        assert!((ml - map).abs() < 1e-6);
    }
    // A very sparse prior suppresses weak evidence.
    let sparse = PriorModel::iid(1e-12).unwrap();
    let det_ml = detector(&s, None, DetectorKind::MlVirtRel);
    let det_map = detector(&s, Some(&sparse), DetectorKind::MapVirtRel);
    for i in 0..8 {
        let ml = det_ml.virtual_coordinate(i, 0.0, false).unwrap().solve_relaxed_ml();
        let map = det_map.virtual_coordinate(i, 0.0, true).unwrap().solve_relaxed_map();
        assert!(map <= ml + 1e-12);
    }
}

#[test]
fn noise_only_covariance_stops_after_one_sweep_at_zero() {
    let cfg = SystemConfig::new(4, 8, 16, 2, 0.1).unwrap();
    let pilots = generate_pilots(&cfg, 3).unwrap();
    let sigma_hat = SampleCovariance::from_matrix(ComplexMatrix::identity(8).scale(0.1), 16).unwrap();
    let prior = PriorModel::iid(0.1).unwrap();
    for kind in DetectorKind::PROPOSED.into_iter().chain([DetectorKind::BlMlFlat]) {
        let out = run_detector(&sigma_hat, &pilots, &cfg, &DetectorConfig::new(kind), Some(&prior)).unwrap();
        assert_eq!(out.sweeps, 1, "{kind}");
        assert!(out.soft.iter().all(|&a| a == 0.0), "{kind}: {:?}", out.soft);
        assert_eq!(out.objective_trace.len(), 2);
    }
}

#[test]
fn single_tap_parametrizations_coincide() {
    let s = scene(6, 8, 16, 1, &[0, 4], 35);
    let prior = PriorModel::iid(0.2).unwrap();
    let run = |kind| run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &DetectorConfig::new(kind), Some(&prior)).unwrap();
    let pairs = [
        (DetectorKind::MlAct, DetectorKind::MlVirtRel),
        (DetectorKind::MapAct, DetectorKind::MapVirtRel),
        (DetectorKind::MlAct, DetectorKind::BlMlFlat),
    ];
    for (a, b) in pairs {
        let (x, y) = (run(a), run(b));
        for (u, v) in x.soft.iter().zip(&y.soft) {
            assert!((u - v).abs() < 1e-8, "{a} vs {b}: {:?} vs {:?}", x.soft, y.soft);
        }
    }
}

#[test]
fn collapse_and_threshold() {
    assert_eq!(collapse_virtual(&[0.0, 1.0, 0.5, 0.5], 2).unwrap(), vec![0.5, 0.5]);
    assert!(collapse_virtual(&[0.0, 1.0, 0.5], 2).is_err());
    assert_eq!(threshold(&[0.1, 0.5, 0.6], 0.5), vec![false, false, true]);
}

#[test]
fn runs_recover_strong_devices_and_traces_decrease() {
    let s = scene(12, 16, 64, 2, &[2, 7, 9], 36);
    let prior = PriorModel::iid(0.2).unwrap();
    for kind in DetectorKind::PROPOSED.into_iter().chain([DetectorKind::BlMlFlat]) {
        let mut config = DetectorConfig::new(kind);
        config.record_steps = true;
        let out = run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &config, Some(&prior)).unwrap();
        if kind != DetectorKind::BlMlFlat {
            assert_eq!(out.binary(0.5), s.truth, "{kind}: {:?}", out.soft);
        }
        for w in out.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{kind}: {:?}", out.objective_trace);
        }
        for w in out.step_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{kind} step trace");
        }
        // The incrementally tracked objective lands on the exact one.
        let last_step = *out.step_trace.last().unwrap();
        let last_exact = *out.objective_trace.last().unwrap();
        assert!((last_step - last_exact).abs() < 1e-7 * (1.0 + last_exact.abs()));
        assert!(out.inverse_drift < 1e-8, "{kind}: drift {}", out.inverse_drift);
        assert!(out.sweeps <= DetectorConfig::DEFAULT_MAX_SWEEPS);
    }
}

#[test]
fn refresh_interval_does_not_change_results_materially() {
    let s = scene(10, 16, 32, 2, &[1, 5], 37);
    let mut a = DetectorConfig::new(DetectorKind::MlAct);
    a.refresh_interval = 1;
    let mut b = a.clone();
    b.refresh_interval = 1_000_000;
    let x = run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &a, None).unwrap();
    let y = run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &b, None).unwrap();
    for (u, v) in x.soft.iter().zip(&y.soft) {
        assert!((u - v).abs() < 1e-7);
    }
}

#[test]
fn random_order_and_continuation_are_reproducible() {
    let s = scene(8, 16, 32, 2, &[0, 6], 38);
    let mut config = DetectorConfig::new(DetectorKind::MlVirtPen);
    config.coordinate_order = CoordinateOrder::RandomPerSweep;
    config.order_seed = 9;
    config.rho_continuation = true;
    let x = run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &config, None).unwrap();
    let y = run_detector(&s.sigma_hat, &s.pilots, &s.cfg, &config, None).unwrap();
    assert_eq!(x.soft, y.soft);
    assert_eq!(x.binary(0.5), s.truth);
}

fn single_scene<T: Real>(seed: u64, truth: &[bool]) -> (SystemConfig<T>, PilotSet<T>, SampleCovariance<T>) {
    let cfg = SystemConfig::<T>::new(truth.len(), 16, 32, 2, T::lit(0.1)).unwrap();
    let pilots = generate_pilots(&cfg, seed).unwrap();
    let mut ch = rng::seeded(seed, Purpose::Channel);
    let real = ChannelRealization::draw(&cfg, truth.to_vec(), &mut ch).unwrap();
    let mut noise = rng::seeded(seed, Purpose::Noise);
    let r = synthesize_received(&cfg, &pilots, &real, &mut noise).unwrap();
    let sh = sample_covariance(&r).unwrap();
    (cfg, pilots, sh)
}

#[test]
fn single_precision_tracks_double_precision() {
    let truth = vec![false, true, false, false, true, false];
    let (c32, p32, s32) = single_scene::<f32>(5, &truth);
    let (c64, p64, s64) = single_scene::<f64>(5, &truth);
    for kind in [DetectorKind::MlAct, DetectorKind::MlVirtRel, DetectorKind::MlVirtPen] {
        let lo = run_detector(&s32, &p32, &c32, &DetectorConfig::new(kind), None).unwrap();
        let hi = run_detector(&s64, &p64, &c64, &DetectorConfig::new(kind), None).unwrap();
        for (a, b) in lo.soft.iter().zip(&hi.soft) {
            assert!((*a as f64 - b).abs() < 1e-2, "{kind}: {:?} vs {:?}", lo.soft, hi.soft);
        }
    }
    let out = run_detector(&s32, &p32, &c32, &DetectorConfig::new(DetectorKind::MlAct), None).unwrap();
    assert_eq!(out.binary(0.5), truth);
}

#[test]
fn rejects_mismatched_inputs() {
    let s = scene(4, 8, 16, 2, &[0], 39);
    let other = SystemConfig::new(5, 8, 16, 2, 0.1).unwrap();
    assert!(Detector::new(&other, &s.pilots, &s.sigma_hat, None, DetectorConfig::new(DetectorKind::MlAct)).is_err());
    let mut det = detector(&s, None, DetectorKind::MlAct);
    assert!(det.set_activities(vec![0.0; 3]).is_err());
    assert!(det.set_activities(vec![0.0, 1.5, 0.0, 0.0]).is_err());
    assert!(Detector::new(&s.cfg, &s.pilots, &s.sigma_hat, None, DetectorConfig::new(DetectorKind::BlMlFlat)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_accepted_step_keeps_the_box_and_lowers_the_objective(
        seed in 0u64..1000,
        kind_ix in 0usize..6,
        p in 1usize..4,
    ) {
        let kind = DetectorKind::PROPOSED[kind_ix];
        let s = scene(5, 8, 12, p, &[(seed % 5) as usize], seed);
        let prior = PriorModel::iid(0.2).unwrap();
        let mut det = detector(&s, Some(&prior), kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = det.state().activities.len();
        det.set_activities(random_activities(dim, &mut rng)).unwrap();
        for j in 0..dim {
            let before = det.exact_objective().unwrap();
            det.update_coordinate(j).unwrap();
            let after = det.exact_objective().unwrap();
            prop_assert!(after <= before + 1e-9);
            prop_assert!(det.state().activities.iter().all(|&a| (0.0..=1.0).contains(&a)));
            prop_assert!((det.state().objective - after).abs() < 1e-8 * (1.0 + after.abs()));
        }
    }
}
