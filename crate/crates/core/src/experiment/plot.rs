//! Standalone SVG line plots of report series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ExperimentError, RunReport, Series};
use crate::linalg::linear_fit;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Least-squares slope of `log y` against `log x` over positive points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(a, b)| *a > 0.0 && *b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    (x.len() >= 2).then(|| linear_fit(&x, &y).0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The SVG document for one series; `None` when no point is plottable.
pub fn render_svg(series: &Series) -> Option<String> {
    let map = |v: f64| if series.log_log { v.log10() } else { v };
    let pts: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite() && (!series.log_log || (*x > 0.0 && *y > 0.0)))
        .map(|&(x, y)| (map(x), map(y)))
        .collect();
    if pts.is_empty() {
        return None;
    }
    let span = |vals: Vec<f64>| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 1e-12 * hi.abs().max(1.0) {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = span(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = span(pts.iter().map(|p| p.1).collect());
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}: {}</text>"#,
        WIDTH / 2.0,
        escape(&series.experiment),
        escape(&series.name)
    )
    .unwrap();
    writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .unwrap();
    let scale_note = if series.log_log { " (log10)" } else { "" };
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}{scale_note}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(&series.x_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{}{scale_note}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&series.y_label)
    )
    .unwrap();
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{v:.3}</text>"#
        )
        .unwrap();
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end" font-family="sans-serif" font-size="10">{v:.3}</text>"#,
            MARGIN - 4.0
        )
        .unwrap();
    }
    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, coords.join(" ")).unwrap();
    for &(x, y) in &pts {
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y)).unwrap();
    }
    if series.log_log {
        if let Some(slope) = log_log_slope(&series.points) {
            writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="12">fitted slope {slope:.3}</text>"#,
                WIDTH - MARGIN,
                MARGIN - 8.0
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn file_stem(series: &Series) -> String {
    format!("{}-{}", series.experiment, series.name)
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// Writes one `<experiment>-<series>.svg` per plottable series into `dir`.
pub fn plot_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    if report.records.is_empty() && report.series.is_empty() {
        log::warn!("report is empty; no plots written");
        return Ok(Vec::new());
    }
    let mut written = Vec::new();
    for series in &report.series {
        let Some(svg) = render_svg(series) else {
            log::warn!("series {}/{} has no plottable points", series.experiment, series.name);
            continue;
        };
        let path = dir.join(format!("{}.svg", file_stem(series)));
        std::fs::write(&path, svg).map_err(|e| ExperimentError::Io {
            path: path.clone(),
            message: e.to_string(),
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: Vec<(f64, f64)>, log_log: bool) -> Series {
        Series {
            experiment: "harnack-sweep".into(),
            name: "ratio vs sqrt L".into(),
            x_label: "√L".into(),
            y_label: "ratio".into(),
            log_log,
            points,
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.04, 0.02, 0.01].iter().map(|&h| (h, 3.0 * h * h)).collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&pts[..1]), None);
    }

    #[test]
    fn four_points_one_curve() {
        let svg = render_svg(&series(vec![(1.0, 0.5), (2.0, 1.0), (4.0, 2.1), (8.0, 4.0)], false)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(!svg.contains("fitted slope"));
        let svg = render_svg(&series(vec![(1.0, 1.0), (10.0, 100.0)], true)).unwrap();
        assert!(svg.contains("fitted slope 2.000"));
        assert!(render_svg(&series(vec![(0.0, 1.0)], true)).is_none());
    }

    #[test]
    fn empty_report_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let report = RunReport {
            seed: 0,
            tolerance_scale: 1.0,
            config_hash: String::new(),
            config: String::new(),
            records: vec![],
            series: vec![],
        };
        assert!(plot_report(&report, dir.path()).unwrap().is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
