//! Coverage with full channel state inside the cluster: every cluster BS is
//! cancelled, so interference comes only from outside the cluster disc.

use std::f64::consts::PI;

use super::geometry::{exact_chord, published_chord_length, wedge_unchecked, SectorProfile};
use super::kernel::Interference;
use super::{AnalyticSettings, ChordModel};
use crate::error::{Error, Result};
use crate::model::{pdf_nearest_bs, NetworkConfig};
use crate::numerics::gauss_legendre;

fn check_user(r_u: f64, radius: f64) -> Result<()> {
    if !(0.0..=radius).contains(&r_u) {
        return Err(Error::domain(format!(
            "user radius {r_u} outside the cluster of radius {radius}"
        )));
    }
    Ok(())
}

fn chord_profile(
    kernel: &Interference,
    r_u: f64,
    r_b: f64,
    radius: f64,
    segments: usize,
    chord: ChordModel,
) -> Result<SectorProfile> {
    SectorProfile::build(segments, |phi| {
        let edge = match chord {
            ChordModel::Exact => exact_chord(phi, r_u, radius),
            ChordModel::Published => published_chord_length(phi, r_u, radius),
        };
        kernel.beyond(r_b, edge)
    })
}

/// Coverage of a user whose serving disc lies inside the cluster
/// (`r_u + r_b ≤ R`), with the angular integral as an `M`-sector sum.
pub fn coverage_type1_full(
    threshold: f64,
    r_u: f64,
    r_b: f64,
    config: &NetworkConfig,
    segments: usize,
    chord: ChordModel,
) -> Result<f64> {
    let radius = config.cluster_radius;
    check_user(r_u, radius)?;
    let kernel = Interference::new(config.alpha, threshold);
    type1(&kernel, r_u, r_b, config, segments, chord)
}

fn type1(
    kernel: &Interference,
    r_u: f64,
    r_b: f64,
    config: &NetworkConfig,
    segments: usize,
    chord: ChordModel,
) -> Result<f64> {
    let profile = chord_profile(kernel, r_u, r_b, config.cluster_radius, segments, chord)?;
    let exponent = config.bs_density * 2.0 * profile.half_turn();
    Ok(kernel.noise_factor(config.normalized_noise(), r_b) * (-exponent).exp())
}

/// Coverage of a user whose serving disc straddles the cluster boundary
/// (`R − r_u < r_b < R + r_u`). Outside the cluster, interferers start at
/// `r_b` inside the outward wedge `|φ| < Θ` and at the boundary elsewhere.
pub fn coverage_type2_full(
    threshold: f64,
    r_u: f64,
    r_b: f64,
    config: &NetworkConfig,
    segments: usize,
) -> Result<f64> {
    let radius = config.cluster_radius;
    check_user(r_u, radius)?;
    let kernel = Interference::new(config.alpha, threshold);
    type2(&kernel, r_u, r_b, config, segments)
}

fn type2(kernel: &Interference, r_u: f64, r_b: f64, config: &NetworkConfig, segments: usize) -> Result<f64> {
    let radius = config.cluster_radius;
    let theta = wedge_unchecked(r_b, r_u, radius);
    let profile = chord_profile(kernel, r_u, r_b, radius, segments, ChordModel::Exact)?;
    let wedge = 2.0 * theta * kernel.beyond(r_b, r_b)?;
    let rest = 2.0 * profile.integral(theta, PI);
    let exponent = config.bs_density * (wedge + rest);
    Ok(kernel.noise_factor(config.normalized_noise(), r_b) * (-exponent).exp())
}

/// Lower bound on coverage at linear threshold `threshold`, averaged over
/// the user position and the serving distance.
pub(crate) fn coverage_at(config: &NetworkConfig, settings: &AnalyticSettings, threshold: f64) -> Result<f64> {
    let radius = config.cluster_radius;
    let density = config.bs_density;
    let rule = gauss_legendre(settings.quadrature_order)?;
    let panels = settings.radial_panels;
    let kernel = Interference::new(config.alpha, threshold);
    let support = kernel.noise_support(config.normalized_noise());

    let mut total = 0.0;
    for (r_u, w_u) in rule.points(0.0, radius, panels) {
        let f_u = 2.0 * r_u / (radius * radius);
        let inner = radius - r_u;
        let outer = radius + r_u;

        let mut inside = 0.0;
        for (r_b, w_b) in rule.points(0.0, inner.min(support), panels) {
            let p = type1(&kernel, r_u, r_b, config, settings.angular_segments, settings.chord_model)?;
            inside += w_b * pdf_nearest_bs(r_b, density) * p;
        }
        let mut straddle = 0.0;
        if support > inner {
            for (r_b, w_b) in rule.points(inner, outer.min(support), panels) {
                let p = type2(&kernel, r_u, r_b, config, settings.angular_segments)?;
                straddle += w_b * pdf_nearest_bs(r_b, density) * p;
            }
        }
        total += w_u * f_u * (inside + straddle);
    }
    Ok(total)
}

/// Probability that the serving disc swallows the whole cluster; these users
/// are dropped from the bound.
pub(crate) fn excluded_mass(config: &NetworkConfig, settings: &AnalyticSettings) -> Result<f64> {
    let radius = config.cluster_radius;
    let rule = gauss_legendre(settings.quadrature_order)?;
    let mass = PI * config.bs_density;
    Ok(rule
        .points(0.0, radius, settings.radial_panels)
        .map(|(r_u, w)| w * 2.0 * r_u / (radius * radius) * (-mass * (radius + r_u).powi(2)).exp())
        .sum())
}
