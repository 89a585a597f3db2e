//! JSON run configuration.
//!
//! ```json
//! {
//!   "system": {"n_devices": 100, "n_subcarriers": 24, "n_antennas": 32, "n_taps": 2, "noise_var": 0.1},
//!   "prior": {"kind": "iid", "q": 0.05},
//!   "detector": {"kind": "ml-act"},
//!   "trials": 200,
//!   "seed": 1,
//!   "threshold": "calibrate",
//!   "sweep": {"parameter": "L", "values": [16, 24, 32]},
//!   "output": {"csv": "results.csv", "svg": "results.svg"}
//! }
//! ```
//!
//! Relative paths are resolved against the directory of the config file.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use gf_detect::bench::{ExperimentSpec, Sweep, ThresholdRule};
use gf_detect::detect::{CoordinateOrder, DetectorConfig, DetectorKind};
use gf_detect::prior::{MvbCoefficients, MvbTerm, PriorModel};
use gf_detect::signal::{PilotSet, SystemConfig};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    system: SystemSection,
    prior: PriorSection,
    detector: DetectorSection,
    trials: usize,
    seed: u64,
    threshold: Value,
    /// Defaults to `trials`.
    calibration_trials: Option<usize>,
    #[serde(default)]
    shared_pilots: bool,
    sweep: Option<SweepSection>,
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    n_devices: usize,
    n_subcarriers: usize,
    n_antennas: usize,
    n_taps: usize,
    noise_var: f64,
    /// Large-scale fading per device, all ones when absent.
    gains: Option<Vec<f64>>,
    /// Fixed pilots in `n l re im` text form, shared by every trial.
    pilot_file: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PriorSection {
    Iid {
        q: f64,
    },
    Group {
        q: f64,
        /// Number of equal contiguous groups.
        k_groups: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Mvb {
        coeffs: Vec<TermSection>,
    },
}

fn default_epsilon() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSection {
    omega: Vec<usize>,
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorSection {
    kind: String,
    rho: Option<f64>,
    #[serde(default)]
    rho_continuation: bool,
    max_sweeps: Option<usize>,
    tol: Option<f64>,
    refresh_interval: Option<usize>,
    /// `"natural"` (default) or `"random"`.
    coordinate_order: Option<String>,
    #[serde(default)]
    order_seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    parameter: String,
    values: Vec<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    csv: PathBuf,
    svg: Option<PathBuf>,
}

/// A validated run: the base spec, an optional sweep and where to write.
#[derive(Debug)]
pub struct Plan {
    pub spec: ExperimentSpec<f64>,
    pub sweep: Option<Sweep>,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    /// CSV column used as the x axis of the plot.
    pub x_column: Option<&'static str>,
}

/// Error located at the first line mentioning `key`, if any.
fn located(path: &Path, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    let needle = format!("\"{key}\"");
    match text.lines().position(|l| l.contains(&needle)) {
        Some(line) => CliError::Config(format!("{}:{}: {msg}", path.display(), line + 1)),
        None => CliError::Config(format!("{}: {msg}", path.display())),
    }
}

pub fn load(path: &Path) -> Result<Plan, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
    parse(path, &text)
}

pub fn parse(path: &Path, text: &str) -> Result<Plan, CliError> {
    let raw: RunConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?;
    let base_dir = path.parent().unwrap_or(Path::new(""));
    let at = |key: &str, msg: String| located(path, text, key, msg);

    let sys = &raw.system;
    let mut system = SystemConfig::new(sys.n_devices, sys.n_subcarriers, sys.n_antennas, sys.n_taps, sys.noise_var)
        .map_err(|e| at("system", e.to_string()))?;
    if let Some(gains) = &sys.gains {
        system = system.with_gains(gains.clone()).map_err(|e| at("gains", e.to_string()))?;
    }

    let (prior, group_size) = match &raw.prior {
        PriorSection::Iid { q } => (PriorModel::iid(*q), None),
        PriorSection::Group { q, k_groups, epsilon } => {
            let size = (*k_groups > 0 && sys.n_devices % k_groups == 0).then(|| sys.n_devices / k_groups);
            (PriorModel::group_contiguous(sys.n_devices, *k_groups, *q, *epsilon), size)
        }
        PriorSection::Mvb { coeffs } => {
            let terms = coeffs
                .iter()
                .map(|t| MvbTerm {
                    omega: t.omega.clone(),
                    c: t.c,
                })
                .collect();
            (MvbCoefficients::new(sys.n_devices, terms).and_then(PriorModel::mvb), None)
        }
    };
    let prior = prior.map_err(|e| at("prior", e.to_string()))?;

    let det = &raw.detector;
    let kind: DetectorKind = det.kind.parse().map_err(|e: gf_detect::Error| at("kind", e.to_string()))?;
    let mut detector = DetectorConfig::new(kind);
    if let Some(rho) = det.rho {
        detector.rho = rho;
    }
    detector.rho_continuation = det.rho_continuation;
    if let Some(v) = det.max_sweeps {
        detector.max_sweeps = v;
    }
    if let Some(v) = det.tol {
        detector.tol = v;
    }
    if let Some(v) = det.refresh_interval {
        detector.refresh_interval = v;
    }
    detector.coordinate_order = match det.coordinate_order.as_deref() {
        None | Some("natural") => CoordinateOrder::Natural,
        Some("random") => CoordinateOrder::RandomPerSweep,
        Some(other) => {
            return Err(at(
                "coordinate_order",
                format!("unknown coordinate order `{other}`, expected `natural` or `random`"),
            ))
        }
    };
    detector.order_seed = det.order_seed;

    let threshold = match &raw.threshold {
        Value::String(s) if s == "calibrate" => ThresholdRule::Calibrate,
        Value::Number(n) => ThresholdRule::Fixed(n.as_f64().unwrap_or(f64::NAN)),
        other => {
            return Err(at(
                "threshold",
                format!("threshold must be \"calibrate\" or a number in [0, 1], got {other}"),
            ))
        }
    };

    let mut spec = ExperimentSpec::new(system, prior, detector, raw.trials, raw.seed);
    spec.threshold = threshold;
    spec.calibration_trials = raw.calibration_trials.unwrap_or(raw.trials);
    spec.shared_pilots = raw.shared_pilots;
    spec.group_size = group_size;
    if let Some(file) = &sys.pilot_file {
        let file = base_dir.join(file);
        let pilot_text = std::fs::read_to_string(&file)
            .map_err(|e| at("pilot_file", format!("cannot read {}: {e}", file.display())))?;
        let pilots = PilotSet::from_text(&pilot_text, sys.n_devices, sys.n_subcarriers, sys.n_taps)
            .map_err(|e| at("pilot_file", format!("{}: {e}", file.display())))?;
        spec.pilots = Some(pilots);
    }
    spec.validate().map_err(|e| at("detector", e.to_string()))?;

    let (sweep, x_column) = match &raw.sweep {
        None => (None, None),
        Some(s) => {
            let (sweep, col) = parse_sweep(s).map_err(|msg| at("sweep", msg))?;
            if sweep.is_empty() {
                return Err(at("values", "sweep has no values".into()));
            }
            for k in 0..sweep.len() {
                sweep
                    .cell(&spec, k)
                    .and_then(|cell| cell.validate())
                    .map_err(|e| at("values", format!("sweep value {}: {e}", k + 1)))?;
            }
            (Some(sweep), col)
        }
    };
    if raw.output.svg.is_some() && x_column.is_none() {
        return Err(at(
            "svg",
            "a plot needs a sweep over P, L, M or q to provide the x axis".into(),
        ));
    }

    Ok(Plan {
        spec,
        sweep,
        csv: base_dir.join(&raw.output.csv),
        svg: raw.output.svg.as_ref().map(|p| base_dir.join(p)),
        x_column,
    })
}

fn parse_sweep(s: &SweepSection) -> Result<(Sweep, Option<&'static str>), String> {
    let counts = || -> Result<Vec<usize>, String> {
        s.values
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| format!("sweep value {v} is not a non-negative integer"))
            })
            .collect()
    };
    Ok(match s.parameter.as_str() {
        "P" => (Sweep::Taps(counts()?), Some("P")),
        "L" => (Sweep::Subcarriers(counts()?), Some("L")),
        "M" => (Sweep::Antennas(counts()?), Some("M")),
        "group_size" => (Sweep::GroupSize(counts()?), None),
        "q" => {
            let qs = s
                .values
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| format!("sweep value {v} is not a number")))
                .collect::<Result<_, _>>()?;
            (Sweep::ActivityProbability(qs), Some("q"))
        }
        "detector" => {
            let kinds = s
                .values
                .iter()
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| format!("sweep value {v} is not a detector name"))?
                        .parse::<DetectorKind>()
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            (Sweep::Detector(kinds), None)
        }
        other => {
            return Err(format!(
                "unknown sweep parameter `{other}`, expected one of P, L, M, q, group_size, detector"
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "system": {"n_devices": 8, "n_subcarriers": 8, "n_antennas": 4, "n_taps": 2, "noise_var": 0.1},
  "prior": {"kind": "iid", "q": 0.2},
  "detector": {"kind": "ml-act"},
  "trials": 2,
  "seed": 3,
  "threshold": "calibrate",
  "output": {"csv": "out.csv"}
}"#;

    fn parse_str(text: &str) -> Result<Plan, CliError> {
        parse(Path::new("dir/run.json"), text)
    }

    fn config_message(r: Result<Plan, CliError>) -> String {
        match r {
            Err(CliError::Config(msg)) => msg,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let plan = parse_str(MINIMAL).unwrap();
        assert_eq!(plan.spec.threshold, ThresholdRule::Calibrate);
        assert_eq!(plan.spec.calibration_trials, 2);
        assert_eq!(plan.spec.detector, DetectorConfig::new(DetectorKind::MlAct));
        assert_eq!(plan.csv, Path::new("dir/out.csv"));
        assert!(plan.sweep.is_none() && plan.svg.is_none());
    }

    #[test]
    fn unknown_keys_are_named_with_their_line() {
        let text = MINIMAL.replace("\"trials\": 2,", "\"trials\": 2,\n  \"foo\": 1,");
        let msg = config_message(parse_str(&text));
        assert!(msg.contains("foo"), "{msg}");
        assert!(msg.starts_with("dir/run.json:6:"), "{msg}");
        let text = MINIMAL.replace("\"kind\": \"ml-act\"", "\"kind\": \"ml-act\", \"bar\": 2");
        assert!(config_message(parse_str(&text)).contains("bar"));
    }

    #[test]
    fn semantic_errors_point_at_their_section() {
        let text = MINIMAL.replace("\"q\": 0.2", "\"q\": 1.5");
        let msg = config_message(parse_str(&text));
        assert!(msg.starts_with("dir/run.json:3:"), "{msg}");
        let text = MINIMAL.replace("ml-act", "ml-fast");
        assert!(config_message(parse_str(&text)).contains("ml-fast"));
        let text = MINIMAL.replace("\"calibrate\"", "\"auto\"");
        assert!(config_message(parse_str(&text)).contains("threshold"));
        let text = MINIMAL.replace("\"calibrate\"", "1.5");
        assert!(config_message(parse_str(&text)).contains("threshold"));
    }

    #[test]
    fn prior_forms() {
        let group = MINIMAL.replace(
            r#"{"kind": "iid", "q": 0.2}"#,
            r#"{"kind": "group", "q": 0.2, "k_groups": 4}"#,
        );
        let plan = parse_str(&group).unwrap();
        assert_eq!(plan.spec.group_size, Some(2));
        assert_eq!(plan.spec.prior, PriorModel::group_contiguous(8, 4, 0.2, 1e-3).unwrap());
        let mvb = MINIMAL.replace(
            r#"{"kind": "iid", "q": 0.2}"#,
            r#"{"kind": "mvb", "coeffs": [{"omega": [0], "c": -1.0}, {"omega": [0, 1], "c": 0.5}]}"#,
        );
        assert!(matches!(parse_str(&mvb).unwrap().spec.prior, PriorModel::Mvb(_)));
        let bad = MINIMAL.replace(r#""q": 0.2}"#, r#""q": 0.2, "epsilon": 0.1}"#);
        assert!(config_message(parse_str(&bad)).contains("epsilon"));
    }

    #[test]
    fn map_detectors_need_a_usable_prior() {
        let text = MINIMAL.replace("ml-act", "map-act").replace("0.2}", "0.0}");
        assert!(config_message(parse_str(&text)).contains("strictly inside (0, 1)"));
    }

    #[test]
    fn sweeps() {
        let with = |sweep: &str| MINIMAL.replace("\"output\"", &format!("\"sweep\": {sweep},\n  \"output\""));
        let plan = parse_str(&with(r#"{"parameter": "L", "values": [8, 12, 16]}"#)).unwrap();
        assert_eq!(plan.sweep, Some(Sweep::Subcarriers(vec![8, 12, 16])));
        assert_eq!(plan.x_column, Some("L"));
        let plan = parse_str(&with(r#"{"parameter": "detector", "values": ["ml-act", "bl-ml-flat"]}"#)).unwrap();
        assert_eq!(
            plan.sweep,
            Some(Sweep::Detector(vec![DetectorKind::MlAct, DetectorKind::BlMlFlat]))
        );
        assert!(config_message(parse_str(&with(r#"{"parameter": "N", "values": [1]}"#))).contains("`N`"));
        // P = 8 is not below L = 8.
        assert!(config_message(parse_str(&with(r#"{"parameter": "P", "values": [1, 8]}"#))).contains("value 2"));
        assert!(config_message(parse_str(&with(r#"{"parameter": "q", "values": []}"#))).contains("no values"));
    }

    #[test]
    fn plots_need_a_numeric_sweep() {
        let text = MINIMAL.replace(r#"{"csv": "out.csv"}"#, r#"{"csv": "out.csv", "svg": "out.svg"}"#);
        assert!(config_message(parse_str(&text)).contains("sweep"));
    }

    #[test]
    fn detector_options() {
        let text = MINIMAL.replace(
            r#"{"kind": "ml-act"}"#,
            r#"{"kind": "ml-virt-pen", "rho": 2.0, "rho_continuation": true, "max_sweeps": 7, "tol": 0.0,
               "refresh_interval": 5, "coordinate_order": "random", "order_seed": 11}"#,
        );
        let d = parse_str(&text).unwrap().spec.detector;
        assert_eq!((d.rho, d.rho_continuation, d.max_sweeps, d.tol), (2.0, true, 7, 0.0));
        assert_eq!((d.refresh_interval, d.coordinate_order, d.order_seed), (5, CoordinateOrder::RandomPerSweep, 11));
        let bad = text.replace("\"random\"", "\"shuffled\"");
        assert!(config_message(parse_str(&bad)).contains("shuffled"));
    }
}
