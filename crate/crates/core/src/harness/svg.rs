//! Self-contained SVG charts: semilog-y coverage curves, or linear rate CDFs
//! when the bundle has no coverage curves.

use std::fmt::Write as _;
use std::path::Path;

use super::ReportBundle;
use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
];
/// Lowest decade shown on the coverage axis.
const MIN_DECADE: i32 = -4;

struct Series<'a> {
    label: String,
    xs: &'a [f64],
    ys: &'a [f64],
    markers: bool,
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
    log_y: bool,
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi, v) = if self.log_y {
            (self.y.0.log10(), self.y.1.log10(), y.max(self.y.0).log10())
        } else {
            (self.y.0, self.y.1, y)
        };
        HEIGHT - BOTTOM - (v - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Fixed-precision coordinate so output bytes do not depend on float noise.
fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick step from {1, 2, 5}×10^k giving at most ten intervals.
fn tick_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * base).find(|s| *s >= raw).unwrap_or(10.0 * base)
}

fn label_number(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Writes the chart for `bundle` to `path`.
pub fn emit_svg(bundle: &ReportBundle, path: &Path) -> Result<()> {
    let text = render(bundle)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn render(bundle: &ReportBundle) -> Result<String> {
    let coverage_chart = !bundle.curves.is_empty();
    let series: Vec<Series> = if coverage_chart {
        bundle
            .curves
            .iter()
            .map(|c| Series {
                label: format!("{} {}", c.scenario, c.method.tag()),
                xs: &c.thresholds_db,
                ys: &c.coverage,
                markers: c.method.is_monte_carlo(),
            })
            .collect()
    } else {
        bundle
            .rate_cdfs
            .iter()
            .map(|c| Series {
                label: format!("{} {}", c.scenario, c.method.tag()),
                xs: &c.rates,
                ys: &c.cdf,
                markers: false,
            })
            .collect()
    };
    if series.iter().all(|s| s.xs.is_empty()) {
        return Err(Error::Usage("nothing to plot: the report has no coverage curve or rate CDF".into()));
    }

    let xs = series.iter().flat_map(|s| s.xs.iter().copied());
    let (mut x_lo, mut x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if x_hi <= x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let axes = if coverage_chart {
        let smallest = series
            .iter()
            .flat_map(|s| s.ys.iter().copied())
            .filter(|y| *y > 0.0)
            .fold(1.0f64, f64::min);
        let decade = (smallest.log10().floor() as i32).clamp(MIN_DECADE, -1);
        Axes {
            x: (x_lo, x_hi),
            y: (10f64.powi(decade), 1.0),
            log_y: true,
        }
    } else {
        Axes {
            x: (x_lo, x_hi),
            y: (0.0, 1.0),
            log_y: false,
        }
    };
    let (x_title, y_title) = if coverage_chart {
        ("SINR threshold T (dB)", "Coverage probability")
    } else {
        ("Rate t (bits/s/Hz)", "Rate CDF")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(
        s,
        "<desc>experiment={} seed={} digest={}</desc>",
        escape(&bundle.metadata.experiment),
        bundle.metadata.seed,
        bundle.metadata.config_digest
    );
    let _ = writeln!(s, r#"<rect width="{}" height="{}" fill="white"/>"#, WIDTH, HEIGHT);

    // Grid and tick labels.
    let (x0, x1) = (axes.px(axes.x.0), axes.px(axes.x.1));
    let (y0, y1) = (axes.py(axes.y.0), axes.py(axes.y.1));
    let step = tick_step(axes.x.1 - axes.x.0);
    let mut k = (axes.x.0 / step).ceil() as i64;
    while (k as f64) * step <= axes.x.1 + 1e-9 * step {
        let v = k as f64 * step;
        let x = axes.px(v);
        let _ = writeln!(s, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#dddddd"/>"##, c(x), c(y1), c(x), c(y0));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, c(x), c(y0 + 16.0), label_number(v));
        k += 1;
    }
    let y_ticks: Vec<f64> = if axes.log_y {
        let lo = axes.y.0.log10().round() as i32;
        (lo..=0).map(|d| 10f64.powi(d)).collect()
    } else {
        (0..=5).map(|i| i as f64 * 0.2).collect()
    };
    for v in y_ticks {
        let y = axes.py(v);
        let _ = writeln!(s, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#dddddd"/>"##, c(x0), c(y), c(x1), c(y));
        let text = if axes.log_y { format!("1e{}", v.log10().round()) } else { label_number(v) };
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, c(x0 - 6.0), c(y + 4.0), text);
    }
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        c(x0),
        c(y1),
        c(x1 - x0),
        c(y0 - y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c(0.5 * (x0 + x1)),
        c(HEIGHT - 15.0),
        x_title
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">{t}</text>"#,
        y = c(0.5 * (y0 + y1)),
        t = y_title
    );

    // Data.
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = ser
            .xs
            .iter()
            .zip(ser.ys)
            .map(|(x, y)| format!("{},{}", c(axes.px(*x)), c(axes.py(*y))))
            .collect();
        if ser.markers {
            for p in &points {
                let (x, y) = p.split_once(',').expect("coordinate pair");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3.5" fill="none" stroke="{color}"/>"#);
            }
        } else {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        if ser.markers {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="3.5" fill="none" stroke="{color}"/>"#,
                c(lx + 12.0),
                c(ly - 4.0)
            );
        } else {
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1.5"/>"#,
                c(lx),
                c(ly - 4.0),
                c(lx + 24.0),
                c(ly - 4.0)
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, c(lx + 30.0), c(ly), escape(&ser.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
