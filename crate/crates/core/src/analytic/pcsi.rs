//! Coverage when each user reports only its `L` strongest intra-cluster
//! channels. The serving BS and the next `L − 1` cluster BSs are cancelled;
//! everything else, inside the cluster or not, interferes.
//!
//! `r_l` is the distance to the farthest cancelled BS. Given `r_b`, the
//! `L − 1` cancelled BSs beyond the serving one are the nearest points of
//! the process outside the serving disc, so `r_l² − r_b²` is
//! Gamma(`L − 1`, 1/(πλ)); with `L = 1` the two distances coincide.

use std::f64::consts::PI;

use super::geometry::{exact_chord, wedge_unchecked, SectorProfile};
use super::kernel::Interference;
use super::AnalyticSettings;
use crate::error::{Error, Result};
use crate::model::{pdf_lth_given_rb, pdf_nearest_bs, NetworkConfig};
use crate::numerics::gauss_legendre;

/// Per-user state shared by the three region formulas.
struct UserView<'a> {
    kernel: Interference,
    config: &'a NetworkConfig,
    r_u: f64,
    r_b: f64,
    noise: f64,
    chord: Option<SectorProfile>,
}

impl<'a> UserView<'a> {
    fn new(config: &'a NetworkConfig, threshold: f64, r_u: f64, r_b: f64) -> Result<Self> {
        if !(0.0..=config.cluster_radius).contains(&r_u) {
            return Err(Error::domain(format!(
                "user radius {r_u} outside the cluster of radius {}",
                config.cluster_radius
            )));
        }
        let kernel = Interference::new(config.alpha, threshold);
        let noise = kernel.noise_factor(config.normalized_noise(), r_b);
        Ok(Self {
            kernel,
            config,
            r_u,
            r_b,
            noise,
            chord: None,
        })
    }

    fn with_chord(mut self, segments: usize) -> Result<Self> {
        let (r_u, r_b, radius) = (self.r_u, self.r_b, self.config.cluster_radius);
        let kernel = self.kernel;
        self.chord = Some(SectorProfile::build(segments, |phi| {
            kernel.beyond(r_b, exact_chord(phi, r_u, radius))
        })?);
        Ok(self)
    }

    fn chord(&self) -> &SectorProfile {
        self.chord.as_ref().expect("chord profile built before use")
    }

    fn check_order(&self, r_l: f64) -> Result<()> {
        if r_l < self.r_b {
            return Err(Error::domain(format!(
                "cancellation radius {r_l} below the serving distance {}",
                self.r_b
            )));
        }
        Ok(())
    }

    fn finish(&self, exponent: f64) -> f64 {
        self.noise * (-self.config.bs_density * exponent).exp()
    }

    fn type1(&self, r_l: f64) -> Result<f64> {
        Ok(self.finish(2.0 * PI * self.kernel.beyond(self.r_b, r_l)?))
    }

    fn type2(&self, r_l: f64) -> Result<f64> {
        let theta = wedge_unchecked(r_l, self.r_u, self.config.cluster_radius);
        let outward = 2.0 * self.chord().integral(0.0, theta);
        let inward = 2.0 * (PI - theta) * self.kernel.beyond(self.r_b, r_l)?;
        Ok(self.finish(outward + inward))
    }

    fn type3(&self, r_l: f64) -> Result<f64> {
        let radius = self.config.cluster_radius;
        let near = wedge_unchecked(self.r_b, self.r_u, radius);
        let far = wedge_unchecked(r_l, self.r_u, radius).max(near);
        let serving = 2.0 * near * self.kernel.beyond(self.r_b, self.r_b)?;
        let band = 2.0 * self.chord().integral(near, far);
        let inward = 2.0 * (PI - far) * self.kernel.beyond(self.r_b, r_l)?;
        Ok(self.finish(serving + band + inward))
    }
}

/// Coverage when both the serving disc and the cancellation disc lie inside
/// the cluster (`r_b ≤ r_l ≤ R − r_u`).
pub fn coverage_type1_pcsi(threshold: f64, r_u: f64, r_b: f64, r_l: f64, config: &NetworkConfig) -> Result<f64> {
    let view = UserView::new(config, threshold, r_u, r_b)?;
    view.check_order(r_l)?;
    view.type1(r_l)
}

/// Coverage when the serving disc is inside the cluster but the cancellation
/// disc crosses its boundary (`r_b < R − r_u ≤ r_l ≤ R + r_u`).
pub fn coverage_type2_pcsi(
    threshold: f64,
    r_u: f64,
    r_b: f64,
    r_l: f64,
    config: &NetworkConfig,
    segments: usize,
) -> Result<f64> {
    let view = UserView::new(config, threshold, r_u, r_b)?.with_chord(segments)?;
    view.check_order(r_l)?;
    view.type2(r_l)
}

/// Coverage when the serving disc itself crosses the cluster boundary
/// (`R − r_u ≤ r_b ≤ r_l ≤ R + r_u`).
pub fn coverage_type3_pcsi(
    threshold: f64,
    r_u: f64,
    r_b: f64,
    r_l: f64,
    config: &NetworkConfig,
    segments: usize,
) -> Result<f64> {
    let view = UserView::new(config, threshold, r_u, r_b)?.with_chord(segments)?;
    view.check_order(r_l)?;
    view.type3(r_l)
}

pub(crate) fn coverage_at(
    config: &NetworkConfig,
    settings: &AnalyticSettings,
    threshold: f64,
    csi_limit: u32,
) -> Result<f64> {
    let radius = config.cluster_radius;
    let density = config.bs_density;
    let rule = gauss_legendre(settings.quadrature_order)?;
    let panels = settings.radial_panels;
    let segments = settings.angular_segments;
    let extra = csi_limit.saturating_sub(1);
    let support = Interference::new(config.alpha, threshold).noise_support(config.normalized_noise());

    let mut total = 0.0;
    for (r_u, w_u) in rule.points(0.0, radius, panels) {
        let f_u = 2.0 * r_u / (radius * radius);
        let inner = radius - r_u;
        let outer = radius + r_u;
        let mut acc = 0.0;

        for (r_b, w_b) in rule.points(0.0, inner.min(support), panels) {
            let view = UserView::new(config, threshold, r_u, r_b)?;
            let value = if extra == 0 {
                view.type1(r_b)?
            } else {
                let view = view.with_chord(segments)?;
                let mut v = 0.0;
                for (r_l, w_l) in rule.points(r_b, inner, panels) {
                    v += w_l * pdf_lth_given_rb(r_l, r_b, extra, density)? * view.type1(r_l)?;
                }
                for (r_l, w_l) in rule.points(inner, outer, panels) {
                    v += w_l * pdf_lth_given_rb(r_l, r_b, extra, density)? * view.type2(r_l)?;
                }
                v
            };
            acc += w_b * pdf_nearest_bs(r_b, density) * value;
        }

        if support > inner {
            for (r_b, w_b) in rule.points(inner, outer.min(support), panels) {
                let view = UserView::new(config, threshold, r_u, r_b)?.with_chord(segments)?;
                let value = if extra == 0 {
                    view.type3(r_b)?
                } else {
                    let mut v = 0.0;
                    for (r_l, w_l) in rule.points(r_b, outer, panels) {
                        v += w_l * pdf_lth_given_rb(r_l, r_b, extra, density)? * view.type3(r_l)?;
                    }
                    v
                };
                acc += w_b * pdf_nearest_bs(r_b, density) * value;
            }
        }
        total += w_u * f_u * acc;
    }
    Ok(total)
}

/// Probability mass of users the bound drops: the serving BS cannot be in the
/// cluster, or the cancellation disc covers the whole cluster.
pub(crate) fn excluded_mass(config: &NetworkConfig, settings: &AnalyticSettings, csi_limit: u32) -> Result<f64> {
    let radius = config.cluster_radius;
    let density = config.bs_density;
    let rule = gauss_legendre(settings.quadrature_order)?;
    let extra = csi_limit.saturating_sub(1);
    let mass = PI * density;
    let mut total = 0.0;
    for (r_u, w_u) in rule.points(0.0, radius, settings.radial_panels) {
        let f_u = 2.0 * r_u / (radius * radius);
        let outer = radius + r_u;
        let mut dropped = (-mass * outer * outer).exp();
        if extra > 0 {
            for (r_b, w_b) in rule.points(0.0, outer, settings.radial_panels) {
                // Gamma(k) survival of r_l² − r_b² at (R + r_u)² − r_b².
                let y = mass * (outer * outer - r_b * r_b);
                let mut term = 1.0;
                let mut survival = 1.0;
                for j in 1..extra {
                    term *= y / j as f64;
                    survival += term;
                }
                dropped += w_b * pdf_nearest_bs(r_b, density) * survival * (-y).exp();
            }
        }
        total += w_u * f_u * dropped;
    }
    Ok(total)
}
