//! Rate distributions from coverage: `P[log₂(1 + SINR) < t] = 1 − P_c(2^t − 1)`.

use serde::{Deserialize, Serialize};

use super::CoverageModel;
use crate::error::{Error, Result};
use crate::numerics::{find_root, gauss_legendre};

/// Coverage level treated as the end of the rate distribution.
const TAIL_COVERAGE: f64 = 1e-6;
const MAX_RATE_BITS: f64 = 256.0;
const PERCENTILE_TOL: f64 = 1e-6;

/// Percentile and mean rates of a typical user, bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    pub p5: f64,
    pub p10: f64,
    pub p50: f64,
    pub mean: f64,
}

impl RateProfile {
    pub fn is_ordered(&self) -> bool {
        0.0 <= self.p5 && self.p5 <= self.p10 && self.p10 <= self.p50 && self.mean >= 0.0
    }
}

pub(crate) fn threshold_for_rate(bits: f64) -> f64 {
    bits.exp2() - 1.0
}

/// Probability that the rate falls below `bits`.
pub fn rate_cdf(model: &CoverageModel, bits: f64) -> Result<f64> {
    if bits < 0.0 {
        return Err(Error::domain(format!("rate must be non-negative, got {bits}")));
    }
    if bits == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - model.coverage_linear(threshold_for_rate(bits))?)
}

/// 5th, 10th and 50th percentile and the mean of the rate.
pub fn rate_profile(model: &CoverageModel) -> Result<RateProfile> {
    profile_from(|bits| rate_cdf(model, bits), |ts| model.coverage_many(ts))
}

/// Rate profile from a rate CDF and a batch coverage evaluator over linear
/// thresholds. The mean integrates `P_c(2^t − 1)` over `t` up to where the
/// coverage drops below 1e-6.
pub(crate) fn profile_from<C, B>(mut cdf: C, batch: B) -> Result<RateProfile>
where
    C: FnMut(f64) -> Result<f64>,
    B: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut top = 8.0;
    while 1.0 - cdf(top)? > TAIL_COVERAGE {
        top *= 2.0;
        if top > MAX_RATE_BITS {
            return Err(Error::Domain(
                "coverage does not decay within the rate search range".into(),
            ));
        }
    }

    let rule = gauss_legendre(8)?;
    let nodes: Vec<(f64, f64)> = rule.points(0.0, top, 6).collect();
    let thresholds: Vec<f64> = nodes.iter().map(|(t, _)| threshold_for_rate(*t)).collect();
    let coverage = batch(&thresholds)?;
    let mean = nodes.iter().zip(&coverage).map(|((_, w), c)| w * c).sum();

    // Coverage at the nodes brackets every percentile.
    let mut grid: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    grid.extend(nodes.iter().zip(&coverage).map(|((t, _), c)| (*t, 1.0 - c)));
    grid.push((top, cdf(top)?));

    let mut percentile = |level: f64| -> Result<f64> {
        let upper = grid
            .iter()
            .position(|(_, f)| *f >= level)
            .ok_or_else(|| Error::Domain(format!("rate CDF never reaches {level}")))?;
        let lo = if upper == 0 { 0.0 } else { grid[upper - 1].0 };
        let hi = grid[upper].0;
        find_root(|t| cdf(t).map(|f| f - level).unwrap_or(f64::NAN), lo, hi, PERCENTILE_TOL)
    };
    let p5 = percentile(0.05)?;
    let p10 = percentile(0.10)?;
    let p50 = percentile(0.50)?;
    Ok(RateProfile { p5, p10, p50, mean })
}
