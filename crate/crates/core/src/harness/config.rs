//! Flat `key = value` scenario files.
//!
//! Pairs are separated by newlines or commas; `#` starts a comment. Every
//! error names the offending key.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    calibrate_noise, density_from_spacing, radius_from_area_km2, CsiLimit, NetworkConfig, DEFAULT_ALPHA,
    DEFAULT_SNR_REF_DB, DEFAULT_SNR_REF_DISTANCE_M,
};
use crate::simulator::{BorderPolicy, ClusterShape, EncodingOrder, PrecoderMode, SimulationPlan};

/// Realizations when the file does not set `realizations`.
pub const DEFAULT_REALIZATIONS: u64 = 100_000;
/// Default for full-LQ runs, where the per-realization factorization dominates.
pub const DEFAULT_FULL_LQ_REALIZATIONS: u64 = 20_000;
pub const DEFAULT_SEED: u64 = 1;

const KEYS: &[&str] = &[
    "alpha",
    "density",
    "spacing_m",
    "cluster_area_km2",
    "cluster_radius_m",
    "snr_ref_db",
    "snr_ref_distance_m",
    "csi_limit",
    "realizations",
    "seed",
    "precoder_mode",
    "cluster_shape",
    "encoding_order",
    "border_policy",
    "thresholds_db",
];

/// Everything a scenario file defines.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub config: NetworkConfig,
    pub plan: SimulationPlan,
    /// Thresholds from `thresholds_db`, or `−5, −2, …, 19` dB.
    pub thresholds_db: Vec<f64>,
}

pub fn default_thresholds_db() -> Vec<f64> {
    (0..9).map(|i| -5.0 + 3.0 * i as f64).collect()
}

pub fn parse_config(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ScenarioFile> {
    let pairs = split_pairs(text)?;
    let get = |key: &str| pairs.get(key).map(String::as_str);

    let alpha = match get("alpha") {
        Some(v) => number("alpha", v)?,
        None => DEFAULT_ALPHA,
    };
    if !(alpha > 2.0) {
        return Err(Error::config("alpha", "alpha must exceed 2"));
    }

    let density = match (get("density"), get("spacing_m")) {
        (Some(_), Some(_)) => return Err(conflict("density", "spacing_m")),
        (Some(v), None) => positive("density", v)?,
        (None, Some(v)) => density_from_spacing(positive("spacing_m", v)?),
        (None, None) => return Err(Error::config("spacing_m", "one of `spacing_m` or `density` is required")),
    };
    let radius = match (get("cluster_area_km2"), get("cluster_radius_m")) {
        (Some(_), Some(_)) => return Err(conflict("cluster_area_km2", "cluster_radius_m")),
        (Some(v), None) => radius_from_area_km2(positive("cluster_area_km2", v)?),
        (None, Some(v)) => positive("cluster_radius_m", v)?,
        (None, None) => {
            return Err(Error::config(
                "cluster_area_km2",
                "one of `cluster_area_km2` or `cluster_radius_m` is required",
            ))
        }
    };

    let snr_db = match get("snr_ref_db") {
        Some(v) => number("snr_ref_db", v)?,
        None => DEFAULT_SNR_REF_DB,
    };
    let snr_distance = match get("snr_ref_distance_m") {
        Some(v) => positive("snr_ref_distance_m", v)?,
        None => DEFAULT_SNR_REF_DISTANCE_M,
    };
    let csi_limit = match get("csi_limit") {
        None | Some("full") => CsiLimit::Full,
        Some(v) => match v.parse::<u32>() {
            Ok(l) if l >= 1 => CsiLimit::Limited(l),
            _ => return Err(Error::config("csi_limit", format!("expected `full` or a positive integer, got `{v}`"))),
        },
    };

    let mut config = NetworkConfig::new(density, radius)?
        .with_csi_limit(csi_limit)
        .with_noise_power(calibrate_noise(snr_distance, snr_db, 1.0, alpha));
    config.alpha = alpha;
    config.validate()?;

    let mode = match get("precoder_mode") {
        Some(v) => v.parse::<PrecoderMode>()?,
        None => match csi_limit {
            CsiLimit::Full => PrecoderMode::FullLq,
            CsiLimit::Limited(_) => PrecoderMode::PcsiExclusion,
        },
    };
    let realizations = match get("realizations") {
        Some(v) => count("realizations", v)?,
        None if mode == PrecoderMode::FullLq => DEFAULT_FULL_LQ_REALIZATIONS,
        None => DEFAULT_REALIZATIONS,
    };
    let seed = match get("seed") {
        Some(v) => v
            .parse::<u64>()
            .map_err(|_| Error::config("seed", format!("expected an unsigned integer, got `{v}`")))?,
        None => DEFAULT_SEED,
    };

    let mut plan = SimulationPlan::new(config.clone(), realizations, seed, mode)?;
    if let Some(v) = get("cluster_shape") {
        plan = plan.with_shape(match v {
            "disc" => ClusterShape::Disc,
            "square" => ClusterShape::Square,
            _ => return Err(choice("cluster_shape", "disc or square", v)),
        });
    }
    if let Some(v) = get("encoding_order") {
        plan = plan.with_encoding_order(match v {
            "center-out" => EncodingOrder::CenterOut,
            "random" => EncodingOrder::Random,
            _ => return Err(choice("encoding_order", "center-out or random", v)),
        });
    }
    if let Some(v) = get("border_policy") {
        plan = plan.with_border_policy(match v {
            "exclude" => BorderPolicy::Exclude,
            "join-serving-tile" => BorderPolicy::JoinServingTile,
            _ => return Err(choice("border_policy", "exclude or join-serving-tile", v)),
        });
    }
    plan.validate()?;

    let thresholds_db = match get("thresholds_db") {
        Some(v) => thresholds(v)?,
        None => default_thresholds_db(),
    };

    Ok(ScenarioFile {
        config,
        plan,
        thresholds_db,
    })
}

fn split_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for item in line.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::config(item, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if value.is_empty() {
                return Err(Error::config(key, "missing value"));
            }
            if pairs.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(key, "key given more than once"));
            }
        }
    }
    Ok(pairs)
}

fn conflict(key: &str, other: &str) -> Error {
    Error::config(key, format!("`{key}` and `{other}` are mutually exclusive"))
}

fn choice(key: &str, expected: &str, got: &str) -> Error {
    Error::config(key, format!("expected {expected}, got `{got}`"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::config(key, format!("expected a finite number, got `{value}`"))),
    }
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x = number(key, value)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::config(key, format!("must be positive, got {x}")))
    }
}

/// Unsigned count, also accepted in exponent form such as `1e5`.
fn count(key: &str, value: &str) -> Result<u64> {
    if let Ok(n) = value.parse::<u64>() {
        return Ok(n);
    }
    let x = number(key, value)?;
    if x >= 1.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(Error::config(key, format!("expected a positive integer, got `{value}`")))
    }
}

/// `start:stop:step` or a whitespace-separated ascending list.
fn thresholds(value: &str) -> Result<Vec<f64>> {
    const KEY: &str = "thresholds_db";
    let list: Vec<f64> = if value.contains(':') {
        let parts: Vec<&str> = value.split(':').map(str::trim).collect();
        let [start, stop, step] = parts[..] else {
            return Err(Error::config(KEY, "range form is `start:stop:step`"));
        };
        let (start, stop, step) = (number(KEY, start)?, number(KEY, stop)?, positive(KEY, step)?);
        let n = ((stop - start) / step + 1e-9).floor();
        if !(n >= 0.0) || n > 10_000.0 {
            return Err(Error::config(KEY, "range must ascend and hold at most 10001 points"));
        }
        (0..=n as usize).map(|i| start + step * i as f64).collect()
    } else {
        value.split_whitespace().map(|v| number(KEY, v)).collect::<Result<_>>()?
    };
    if list.is_empty() {
        return Err(Error::config(KEY, "at least one threshold is required"));
    }
    if list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config(KEY, "thresholds must ascend strictly"));
    }
    Ok(list)
}
