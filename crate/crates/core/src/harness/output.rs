//! CSV and JSON report files.
//!
//! Every file opens with the bundle digest. Numbers are written in plain
//! decimal rounded to six significant digits, so reruns are byte-identical
//! and parsing a file back gives exactly the rounded values.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ReportBundle;
use crate::analytic::Method;
use crate::error::{Error, Result};

/// Output file kinds selectable with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Usage(format!("unknown format `{other}`; expected csv, json or svg"))),
        }
    }
}

/// `x` rounded to six significant digits, in positional notation with
/// trailing zeros dropped.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

fn header_line(bundle: &ReportBundle) -> String {
    format!(
        "# experiment={} seed={} digest={} version={}\n",
        bundle.metadata.experiment, bundle.metadata.seed, bundle.metadata.config_digest, bundle.metadata.tool_version
    )
}

fn csv_text<F>(bundle: &ReportBundle, header: &[&str], mut rows: F) -> Result<String>
where
    F: FnMut(&mut dyn FnMut(Vec<String>) -> Result<()>) -> Result<()>,
{
    let err = |e: csv::Error| Error::Statistical(format!("csv encoding failed: {e}"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    rows(&mut |record| w.write_record(&record).map_err(err))?;
    let body = w.into_inner().map_err(|e| Error::Statistical(format!("csv encoding failed: {e}")))?;
    Ok(header_line(bundle) + &String::from_utf8(body).expect("csv output is utf-8"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn coverage_csv(bundle: &ReportBundle) -> Result<String> {
    csv_text(bundle, &["scenario", "method", "threshold_db", "coverage", "ci_halfwidth"], |push| {
        for c in &bundle.curves {
            for (i, (t, p)) in c.thresholds_db.iter().zip(&c.coverage).enumerate() {
                let ci = c.ci_halfwidth.as_ref().map(|h| sig6(h[i])).unwrap_or_default();
                push(vec![c.scenario.clone(), c.method.tag().into(), sig6(*t), sig6(*p), ci])?;
            }
        }
        Ok(())
    })
}

/// One row per (scenario, threshold): `scenario,method,threshold_db,coverage,ci_halfwidth`.
/// The half-width is empty for analytic curves.
pub fn emit_csv(bundle: &ReportBundle, path: &Path) -> Result<()> {
    write_file(path, &coverage_csv(bundle)?)
}

/// Rate profiles: `scenario,method,p5,p10,p50,mean` in bits/s/Hz.
pub fn emit_rates_csv(bundle: &ReportBundle, path: &Path) -> Result<()> {
    let text = csv_text(bundle, &["scenario", "method", "p5", "p10", "p50", "mean"], |push| {
        for r in &bundle.profiles {
            let p = &r.profile;
            push(vec![r.scenario.clone(), r.method.tag().into(), sig6(p.p5), sig6(p.p10), sig6(p.p50), sig6(p.mean)])?;
        }
        Ok(())
    })?;
    write_file(path, &text)
}

/// Rate CDFs: `scenario,method,rate_bits,cdf`.
pub fn emit_rate_cdf_csv(bundle: &ReportBundle, path: &Path) -> Result<()> {
    let text = csv_text(bundle, &["scenario", "method", "rate_bits", "cdf"], |push| {
        for c in &bundle.rate_cdfs {
            for (t, f) in c.rates.iter().zip(&c.cdf) {
                push(vec![c.scenario.clone(), c.method.tag().into(), sig6(*t), sig6(*f)])?;
            }
        }
        Ok(())
    })?;
    write_file(path, &text)
}

/// Scaling rows with radii in meters.
pub fn emit_scaling_csv(bundle: &ReportBundle, path: &Path) -> Result<()> {
    let header = [
        "epsilon",
        "delta",
        "threshold_db",
        "r_formula_m",
        "r_pre_asymptotic_m",
        "r_numeric_m",
        "ratio",
        "mean_cluster_size",
    ];
    let text = csv_text(bundle, &header, |push| {
        for s in &bundle.scaling {
            push(
                [s.epsilon, s.delta, s.threshold_db, s.r_formula, s.r_pre_asymptotic, s.r_numeric, s.ratio, s.mean_cluster_size]
                    .iter()
                    .map(|v| sig6(*v))
                    .collect(),
            )?;
        }
        Ok(())
    })?;
    write_file(path, &text)
}

/// The whole bundle as pretty-printed JSON.
pub fn emit_json(bundle: &ReportBundle, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(bundle)
        .map_err(|e| Error::Statistical(format!("json encoding failed: {e}")))?;
    text.push('\n');
    write_file(path, &text)
}

/// A parsed row of the coverage CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub scenario: String,
    pub method: Method,
    pub threshold_db: f64,
    pub coverage: f64,
    pub ci_halfwidth: Option<f64>,
}

/// Reads a coverage CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coverage_csv(&text).map_err(|e| Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
}

fn parse_coverage_csv(text: &str) -> std::result::Result<Vec<CsvRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

/// Writes the requested formats into `dir` and returns the paths written.
///
/// CSV always yields `coverage.csv`; the rate, rate-CDF and scaling tables
/// are written when the bundle has such rows. SVG needs a coverage curve or
/// a rate CDF to plot.
pub fn write_report(bundle: &ReportBundle, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    for f in formats {
        match f {
            Format::Csv => {
                let p = dir.join("coverage.csv");
                emit_csv(bundle, &p)?;
                written.push(p);
                if !bundle.profiles.is_empty() {
                    let p = dir.join("rates.csv");
                    emit_rates_csv(bundle, &p)?;
                    written.push(p);
                }
                if !bundle.rate_cdfs.is_empty() {
                    let p = dir.join("rate_cdf.csv");
                    emit_rate_cdf_csv(bundle, &p)?;
                    written.push(p);
                }
                if !bundle.scaling.is_empty() {
                    let p = dir.join("scaling.csv");
                    emit_scaling_csv(bundle, &p)?;
                    written.push(p);
                }
            }
            Format::Json => {
                let p = dir.join("report.json");
                emit_json(bundle, &p)?;
                written.push(p);
            }
            Format::Svg => {
                if !bundle.curves.is_empty() || !bundle.rate_cdfs.is_empty() {
                    let p = dir.join(if bundle.curves.is_empty() { "rate_cdf.svg" } else { "coverage.svg" });
                    super::emit_svg(bundle, &p)?;
                    written.push(p);
                }
            }
        }
    }
    Ok(written)
}
