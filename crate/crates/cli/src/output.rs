//! CSV serialization of metric rows.

use std::path::Path;

use gf_detect::bench::MetricRow;

use crate::CliError;

pub const HEADER: [&str; 14] = [
    "detector",
    "N",
    "L",
    "M",
    "P",
    "q",
    "trials",
    "seed",
    "threshold",
    "error_rate",
    "miss_rate",
    "false_alarm_rate",
    "avg_sweeps",
    "avg_runtime_ms",
];

/// 17 significant digits, enough to round-trip any `f64`.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn record(row: &MetricRow) -> [String; 14] {
    [
        row.detector.clone(),
        row.n_devices.to_string(),
        row.n_subcarriers.to_string(),
        row.n_antennas.to_string(),
        row.n_taps.to_string(),
        real(row.q),
        row.trials.to_string(),
        row.seed.to_string(),
        real(row.threshold),
        real(row.error_rate),
        real(row.miss_rate),
        real(row.false_alarm_rate),
        real(row.avg_sweeps),
        real(row.avg_runtime_ms),
    ]
}

pub fn write_csv(path: &Path, rows: &[MetricRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(HEADER).map_err(io)?;
    for row in rows {
        w.write_record(record(row)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> MetricRow {
        MetricRow {
            detector: "ml-act".into(),
            n_devices: 100,
            n_subcarriers: 24,
            n_antennas: 32,
            n_taps: 2,
            q: 0.05,
            group_size: None,
            trials: 200,
            seed: u64::MAX,
            threshold: 0.14,
            error_rate: 1.0 / 3.0,
            miss_rate: 0.0,
            false_alarm_rate: 1.0 / 3.0,
            avg_sweeps: 4.5,
            avg_runtime_ms: 2.25,
            failures: 0,
            errors: 1,
            misses: 0,
            false_alarms: 1,
        }
    }

    #[test]
    fn reals_round_trip() {
        let r = record(&row());
        assert_eq!(r[5], "5.0000000000000003e-2");
        assert_eq!(r[7], "18446744073709551615");
        for (k, x) in [(5, 0.05), (8, 0.14), (9, 1.0 / 3.0)] {
            assert_eq!(r[k].parse::<f64>().unwrap(), x);
        }
        let digits = r[9].split('e').next().unwrap().replace('.', "");
        assert_eq!(digits.len(), 17);
    }

    #[test]
    fn header_line_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&path, &[row(), row()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "detector,N,L,M,P,q,trials,seed,threshold,error_rate,miss_rate,false_alarm_rate,avg_sweeps,avg_runtime_ms"
        );
        assert_eq!(lines.count(), 2);
    }
}
