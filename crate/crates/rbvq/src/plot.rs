//! Static SVG line plots of metric trajectories.
//!
//! Each input metrics CSV becomes one polyline; the x axis is the shared
//! iteration column, the y axis the chosen metric, optionally log-scaled.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use crate::io;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 82.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 58.0;
const LOG_FLOOR: f64 = 1e-12;

struct Series {
    label: String,
    ys: Vec<f64>,
}

/// Renders `metric` from each input CSV into one SVG at `out`.
pub fn render_line_svg(
    inputs: &[PathBuf],
    metric: &str,
    log_y: bool,
    out: &Path,
) -> anyhow::Result<()> {
    if inputs.is_empty() {
        bail!("no input files to plot");
    }
    let mut iterations: Option<Vec<f64>> = None;
    let mut series = Vec::with_capacity(inputs.len());
    for path in inputs {
        let (header, rows) = io::read_metrics_csv(path)?;
        let x_col = header
            .iter()
            .position(|h| h == "iteration")
            .with_context(|| format!("{}: no iteration column", path.display()))?;
        let y_col = header.iter().position(|h| h == metric).with_context(|| {
            format!(
                "{}: metric {metric:?} not in header ({})",
                path.display(),
                header.join(",")
            )
        })?;
        let xs: Vec<f64> = rows.iter().map(|r| r[x_col]).collect();
        match &iterations {
            None => iterations = Some(xs),
            Some(prev) => {
                if *prev != xs {
                    bail!(
                        "{}: iteration axis differs from the first input",
                        path.display()
                    );
                }
            }
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        series.push(Series {
            label,
            ys: rows.iter().map(|r| r[y_col]).collect(),
        });
    }
    let xs = iterations.expect("at least one input");
    if xs.is_empty() {
        bail!("inputs contain no data rows");
    }

    let transform = |v: f64| if log_y { v.max(LOG_FLOOR).log10() } else { v };
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &series {
        for &v in &s.ys {
            let t = transform(v);
            y_lo = y_lo.min(t);
            y_hi = y_hi.max(t);
        }
    }
    if !y_lo.is_finite() || !y_hi.is_finite() {
        bail!("metric column contains no finite values");
    }
    if (y_hi - y_lo).abs() < 1e-12 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let (x_lo, x_hi) = (xs[0], *xs.last().unwrap());
    let x_span = (x_hi - x_lo).max(1e-12);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x_lo) / x_span * plot_w;
    let sy = move |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B
    );

    // x ticks
    for (v, label) in nice_ticks(x_lo, x_hi, 6) {
        let x = sx(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{label}</text>",
            HEIGHT - MARGIN_B + 20.0
        );
    }
    // y ticks
    let y_ticks = if log_y {
        log_ticks(y_lo, y_hi)
    } else {
        nice_ticks(y_lo, y_hi, 6)
    };
    for (v, label) in y_ticks {
        let y = sy(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{MARGIN_L}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{label}</text>",
            MARGIN_L - 9.0,
            y + 4.0
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            WIDTH - MARGIN_R
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">iteration</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0
    );
    let y_label = if log_y {
        format!("{metric} (log10)")
    } else {
        metric.to_string()
    };
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{y_label}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    // series
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in xs.iter().zip(&s.ys) {
            let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(transform(*y)));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\" points=\"{}\"/>",
            points.trim_end()
        );
    }

    // legend, top right inside the plot box
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = MARGIN_T + 16.0 + i as f64 * 18.0;
        let x = WIDTH - MARGIN_R - 170.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"2.5\"/>",
            x + 26.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            x + 32.0,
            y + 4.0,
            escape(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    std::fs::write(out, svg).with_context(|| format!("write {}", out.display()))?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Round tick positions covering [lo, hi] with steps of 1/2/5 x 10^k.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<(f64, String)> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target.max(2) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let mut v = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while v <= hi + step * 1e-9 {
        let label = if step >= 1.0 {
            format!("{}", v.round() as i64)
        } else {
            format!("{v}")
        };
        out.push((v, label));
        v += step;
    }
    out
}

/// Integer powers of ten across a log10-transformed range.
fn log_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    let (a, b) = (lo.floor() as i64, hi.ceil() as i64);
    for e in a..=b {
        let v = e as f64;
        if v >= lo - 1e-9 && v <= hi + 1e-9 {
            out.push((v, format!("1e{e}")));
        }
    }
    if out.is_empty() {
        out.push((lo, format!("1e{a}")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rbvq_core::metrics::MetricsRecord;
    use std::fs;

    fn write_csv(name: &str, rows: &[(u64, f64)]) -> PathBuf {
        let dir = std::env::temp_dir().join("rbvq-plot-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let records: Vec<MetricsRecord> = rows
            .iter()
            .map(|&(iteration, mse)| MetricsRecord {
                iteration,
                mse,
                dead_units: 0.0,
                avg_degree: 0.0,
                avg_clustering: 0.0,
                rb_count: 0.0,
            })
            .collect();
        crate::io::write_metrics_csv(&path, &records).unwrap();
        path
    }

    #[test]
    fn renders_one_polyline_per_input() {
        let a = write_csv("a.csv", &[(100, 1.0), (200, 0.5), (300, 0.25)]);
        let b = write_csv("b.csv", &[(100, 2.0), (200, 1.0), (300, 0.5)]);
        let out = std::env::temp_dir().join("rbvq-plot-tests").join("p.svg");
        render_line_svg(&[a, b], "mse", false, &out).unwrap();
        let svg = fs::read_to_string(&out).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("</svg>"));
        assert!(svg.contains(">a<") || svg.contains(">a</text>"));
    }

    #[test]
    fn log_scale_handles_zero_values() {
        let a = write_csv("z.csv", &[(100, 0.0), (200, 1.0)]);
        let out = std::env::temp_dir().join("rbvq-plot-tests").join("z.svg");
        render_line_svg(&[a], "mse", true, &out).unwrap();
        assert!(fs::read_to_string(&out).unwrap().contains("log10"));
    }

    #[test]
    fn missing_metric_is_an_error() {
        let a = write_csv("m.csv", &[(100, 1.0)]);
        let out = std::env::temp_dir().join("rbvq-plot-tests").join("m.svg");
        let err = render_line_svg(&[a], "nope", false, &out).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn empty_input_list_is_an_error() {
        let out = std::env::temp_dir().join("rbvq-plot-tests").join("e.svg");
        assert!(render_line_svg(&[], "mse", false, &out).is_err());
    }

    #[test]
    fn mismatched_axes_are_rejected() {
        let a = write_csv("x1.csv", &[(100, 1.0), (200, 0.5)]);
        let b = write_csv("x2.csv", &[(100, 1.0), (300, 0.5)]);
        let out = std::env::temp_dir().join("rbvq-plot-tests").join("x.svg");
        let err = render_line_svg(&[a, b], "mse", false, &out).unwrap_err();
        assert!(err.to_string().contains("iteration axis"));
    }
}
