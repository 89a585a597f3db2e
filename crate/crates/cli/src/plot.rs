//! Static SVG line plots of error rate against one CSV column.
//!
//! The y axis is logarithmic. Zero error rates cannot be drawn on it, so
//! they are raised to `1 / (2 N trials)`, half the smallest nonzero rate a
//! cell can report. The floor is stated in the plot title.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// One line of the plot.
#[derive(Debug, PartialEq)]
pub struct Series {
    pub detector: String,
    /// `(x, error_rate)` sorted by `x`.
    pub points: Vec<(f64, f64)>,
}

/// Parsed plot data.
#[derive(Debug)]
pub struct PlotData {
    pub x_label: String,
    pub series: Vec<Series>,
    /// Value drawn in place of a zero error rate.
    pub floor: f64,
}

fn malformed(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {msg}", path.display()))
}

pub fn read_csv(path: &Path, x: &str) -> Result<PlotData, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| malformed(path, e))?;
    let headers = reader.headers().map_err(|e| malformed(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(path, format!("missing column `{name}`")))
    };
    let (xc, dc, ec, nc, tc) = (col(x)?, col("detector")?, col("error_rate")?, col("N")?, col("trials")?);

    let mut series: Vec<Series> = Vec::new();
    let mut floor = f64::INFINITY;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| malformed(path, e))?;
        let line = k + 2;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let num = |c: usize| -> Result<f64, CliError> {
            field(c).parse::<f64>().map_err(|_| {
                malformed(
                    path,
                    format!("line {line}: `{}` in column `{}` is not a number", field(c), &headers[c]),
                )
            })
        };
        let (xv, err, n, trials) = (num(xc)?, num(ec)?, num(nc)?, num(tc)?);
        if !xv.is_finite() || !(0.0..=1.0).contains(&err) || n < 1.0 || trials < 1.0 {
            return Err(malformed(path, format!("line {line}: values out of range")));
        }
        floor = floor.min(1.0 / (2.0 * n * trials));
        let name = field(dc);
        match series.iter_mut().find(|s| s.detector == name) {
            Some(s) => s.points.push((xv, err)),
            None => series.push(Series {
                detector: name.to_string(),
                points: vec![(xv, err)],
            }),
        }
    }
    if series.is_empty() {
        return Err(malformed(path, "no data rows"));
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(PlotData {
        x_label: x.to_string(),
        series,
        floor,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Shortest decimal form that still reads well on an axis.
fn tick_label(v: f64) -> String {
    let s = format!("{v}");
    if s.len() <= 8 {
        s
    } else {
        format!("{v:.3}")
    }
}

pub fn render(data: &PlotData) -> String {
    let clamp = |y: f64| y.max(data.floor);
    let xs: Vec<f64> = data.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = data.series.iter().flat_map(|s| s.points.iter().map(|p| clamp(p.1))).collect();
    let (mut x0, mut x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let ymax = ys.iter().copied().fold(data.floor, f64::max);
    let d0 = data.floor.log10().floor();
    let d1 = (ymax.log10().ceil()).max(d0 + 1.0);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (d1 - y.log10()) / (d1 - d0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let title = format!(
        "Error rate versus {} (zero rates drawn at floor 1/(2·N·trials) = {:.3e})",
        data.x_label, data.floor
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(&title));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    );

    // Decade grid and y labels.
    let mut d = d0;
    while d <= d1 + 1e-9 {
        let y = py(10f64.powf(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            d as i64
        );
        d += 1.0;
    }
    // X ticks at the distinct x values.
    let mut ticks = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for &t in &ticks {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/>"##,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(&data.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">error rate</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (k, s) in data.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(clamp(y))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-detector="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            escape(&s.detector),
            points.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(clamp(y))
            );
        }
    }

    // Legend.
    let lx = LEFT + pw + 16.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (k, s) in data.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let y = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            y + 4.0,
            escape(&s.detector)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn plot(csv: &Path, x: &str, out: &Path) -> Result<(), CliError> {
    let data = read_csv(csv, x)?;
    std::fs::write(out, render(&data)).map_err(|e| CliError::Output(format!("{}: {e}", out.display())))
}
