//! How large a cooperating cluster has to be for a user at a given depth
//! inside it to get within a factor `1 − ε` of ideal-cooperation coverage.
//!
//! The depth is `δ ∈ (0, 1]`: the user sits at `(R(1 − δ), 0)` in a disc
//! cluster of radius `R` centered at the origin, so `δ = 1` is the center
//! and `δ → 0` the boundary. For small `ε`,
//!
//! ```text
//! R*(ε, δ) ≈ (λ T Δ(δ) η(T) / ε)^{1/(α−2)}
//! ```
//!
//! where `Δ(δ)` integrates `‖z − (1−δ, 0)‖^{−α}` over the exterior of the unit
//! disc and `η(T)` is the noise-tilted mean of `r^α` over the serving
//! distance. `Δ` diverges as the user approaches the boundary.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{nearest_distance_cutoff, pdf_nearest_bs, NetworkConfig};
use crate::numerics::{find_root, gauss_legendre, QuadratureRule};

const ORDER: usize = 20;

/// Inputs of the cluster-radius scaling law.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingQuery {
    /// Relative coverage loss tolerated against the ideal cloud, in `(0, 1)`.
    pub epsilon: f64,
    /// Normalized depth of the user inside the cluster, in `(0, 1]`.
    pub delta: f64,
    /// Linear SINR threshold.
    pub threshold: f64,
    pub config: NetworkConfig,
}

impl ScalingQuery {
    pub fn new(epsilon: f64, delta: f64, threshold: f64, config: NetworkConfig) -> Result<Self> {
        let q = Self {
            epsilon,
            delta,
            threshold,
            config,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::domain(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(Error::domain(format!("threshold must be positive, got {}", self.threshold)));
        }
        self.config.validate()
    }
}

/// Numeric and asymptotic optimal radii for one query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingCheck {
    pub r_numeric: f64,
    pub r_formula: f64,
    pub ratio: f64,
}

/// `∫_{|z|>1} g(‖z − (1−δ, 0)‖) dz` for a kernel `g` decaying like `d^{−α}`.
///
/// Integrates over circles of radius `d` about the user. Circles with
/// `d ≤ δ` lie inside the unit disc and those with `d ≥ 2 − δ` outside it;
/// in between only the arc `2d·arccos((1 − c² − d²)/(2cd))` counts, with
/// `c = 1 − δ`. A cosine map on that band absorbs the square-root edges of
/// the arc length. Past the band the radius is mapped through `u = d^{2−α}`.
fn exterior_integral<G: Fn(f64) -> f64>(delta: f64, alpha: f64, rule: &QuadratureRule, g: G) -> f64 {
    let c = 1.0 - delta;
    let outer = 1.0 + c;
    let mut band = 0.0;
    if c > 0.0 {
        let mid = 0.5 * (delta + outer);
        let half = 0.5 * (outer - delta);
        band = rule
            .points(0.0, PI, 16)
            .map(|(u, w)| {
                let d = mid - half * u.cos();
                let k = ((1.0 - c * c - d * d) / (2.0 * c * d)).clamp(-1.0, 1.0);
                w * half * u.sin() * 2.0 * d * k.acos() * g(d)
            })
            .sum();
    }
    let k = alpha - 2.0;
    let u_top = outer.powf(-k);
    let tail: f64 = rule
        .points(0.0, u_top, 8)
        .map(|(u, w)| {
            let d = u.powf(-1.0 / k);
            w * 2.0 * PI * d * d * g(d) / (u * k)
        })
        .sum();
    band + tail
}

/// `Δ(δ) = ∫_{|z|>1} ‖z − (1−δ, 0)‖^{−α} dz`.
pub fn delta_integral(delta: f64, alpha: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!(
            "delta must lie in (0, 1]; the integral diverges at the boundary (got {delta})"
        )));
    }
    if !(alpha > 2.0) {
        return Err(Error::domain(format!("alpha must exceed 2, got {alpha}")));
    }
    let rule = gauss_legendre(ORDER)?;
    Ok(exterior_integral(delta, alpha, &rule, |d| d.powf(-alpha)))
}

/// Expectation of `e^{−Tσ²r^α} h(r)` over the nearest-BS distance.
fn tilted_expectation<H: Fn(f64) -> f64>(config: &NetworkConfig, threshold: f64, h: H) -> Result<f64> {
    let rule = gauss_legendre(ORDER)?;
    let noise = config.normalized_noise();
    let a = config.alpha;
    let mut top = nearest_distance_cutoff(config.bs_density, 1e-18);
    if noise > 0.0 {
        top = top.min((60.0 / (threshold * noise)).powf(1.0 / a));
    }
    Ok(rule
        .points(0.0, top, 32)
        .map(|(r, w)| w * pdf_nearest_bs(r, config.bs_density) * (-threshold * noise * r.powf(a)).exp() * h(r))
        .sum())
}

/// `η(T) = E[e^{−Tσ²r^α} r^α] / E[e^{−Tσ²r^α}]` over the nearest-BS distance.
pub fn eta(threshold: f64, config: &NetworkConfig) -> Result<f64> {
    let a = config.alpha;
    let num = tilted_expectation(config, threshold, |r| r.powf(a))?;
    let den = tilted_expectation(config, threshold, |_| 1.0)?;
    Ok(num / den)
}

/// `R* = (λ T Δ(δ) η(T) / ε)^{1/(α−2)}` in meters.
pub fn optimal_radius(query: &ScalingQuery) -> Result<f64> {
    query.validate()?;
    radius_for(query, query.epsilon)
}

/// The same law with `ln(1/(1−ε))` in place of `ε`, before the small-`ε`
/// approximation.
pub fn optimal_radius_pre_asymptotic(query: &ScalingQuery) -> Result<f64> {
    query.validate()?;
    radius_for(query, (1.0 / (1.0 - query.epsilon)).ln())
}

fn radius_for(query: &ScalingQuery, penalty: f64) -> Result<f64> {
    let c = &query.config;
    let delta = delta_integral(query.delta, c.alpha)?;
    let eta = eta(query.threshold, c)?;
    Ok((c.bs_density * query.threshold * delta * eta / penalty).powf(1.0 / (c.alpha - 2.0)))
}

/// Expected number of BSs in a cluster of the optimal radius, `λπR*²`.
/// Without noise this is `(T Δ(δ) Γ(α/2+1) / (π ε))^{2/(α−2)}`, free of `λ`.
pub fn mean_cluster_size(query: &ScalingQuery) -> Result<f64> {
    query.validate()?;
    let c = &query.config;
    if c.noise_power == 0.0 {
        let delta = delta_integral(query.delta, c.alpha)?;
        let gamma = libm::tgamma(c.alpha / 2.0 + 1.0);
        return Ok((query.threshold * delta * gamma / (PI * query.epsilon)).powf(2.0 / (c.alpha - 2.0)));
    }
    let r = optimal_radius(query)?;
    Ok(c.bs_density * PI * r * r)
}

/// Coverage of the user at depth `δ` in a cluster of radius `R` when every
/// BS outside the cluster interferes and the user is served by its nearest
/// BS wherever that is.
pub fn boundary_coverage(query: &ScalingQuery, radius: f64) -> Result<f64> {
    let c = &query.config;
    let a = c.alpha;
    let t = query.threshold;
    let rule = gauss_legendre(ORDER)?;
    tilted_expectation(c, t, |r| {
        let kappa = (radius / r).powf(a) / t;
        let exposure = exterior_integral(query.delta, a, &rule, |d| 1.0 / (1.0 + kappa * d.powf(a)));
        (-c.bs_density * radius * radius * exposure).exp()
    })
}

/// Solves `boundary_coverage(R) = (1−ε) · ideal coverage` for `R` and
/// compares it with the asymptotic law.
pub fn verify_scaling(query: &ScalingQuery) -> Result<ScalingCheck> {
    query.validate()?;
    let r_formula = optimal_radius(query)?;
    let ideal = tilted_expectation(&query.config, query.threshold, |_| 1.0)?;
    let target = (1.0 - query.epsilon) * ideal;
    let f = |radius: f64| boundary_coverage(query, radius).map(|p| p - target).unwrap_or(f64::NAN);
    let mut lo = 0.5 * r_formula;
    let mut hi = 2.0 * r_formula;
    for _ in 0..40 {
        if f(lo) < 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..40 {
        if f(hi) > 0.0 {
            break;
        }
        hi *= 2.0;
    }
    let r_numeric = find_root(f, lo, hi, 1e-9 * r_formula)?;
    Ok(ScalingCheck {
        r_numeric,
        r_formula,
        ratio: r_numeric / r_formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::density_from_spacing;

/// Panels of `[a, b]` halving in width toward `a` until narrower than `finest`.
fn graded_panels(a: f64, b: f64, finest: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![b];
    let mut width = b - a;
    while width > finest && cuts.len() < 60 {
        width *= 0.5;
        cuts.push(a + width);
    }
    cuts.push(a);
    cuts.reverse();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn graded_integral<F: FnMut(f64) -> f64>(rule: &QuadratureRule, a: f64, b: f64, finest: f64, mut f: F) -> f64 {
    graded_panels(a, b, finest)
        .into_iter()
        .map(|(lo, hi)| rule.points(lo, hi, 1).map(|(x, w)| w * f(x)).sum::<f64>())
        .sum()
}

    fn noiseless(spacing: f64) -> NetworkConfig {
        NetworkConfig::from_spacing_and_area(spacing, 1.0).unwrap().with_noise_power(0.0)
    }

    /// α = 4 has a closed-form ring integral: ∫₀^{2π} (a − b cos ψ)^{−2} dψ = 2πa/(a² − b²)^{3/2}.
    fn delta_alpha4_oracle(delta: f64) -> f64 {
        let c = 1.0 - delta;
        let rule = gauss_legendre(40).unwrap();
        let ring = |rho: f64| {
            let a = rho * rho + c * c;
            let b = 2.0 * rho * c;
            2.0 * PI * a / (a * a - b * b).powf(1.5)
        };
        // ρ = 1/s on (0, 1], graded toward s = 1.
        graded_integral(&rule, 0.0, 1.0, 1.0, |s| ring(1.0 / s) / (s * s * s))
            + graded_integral(&rule, 0.0, 1.0, 0.01 * delta, |x| {
                let s = 1.0 - x;
                ring(1.0 / s) / (s * s * s)
            })
            - graded_integral(&rule, 0.0, 1.0, 1.0, |s| ring(1.0 / s) / (s * s * s))
    }

    #[test]
    fn centered_user_closed_form() {
        assert!((delta_integral(1.0, 4.0).unwrap() - PI).abs() < 1e-10);
        assert!((delta_integral(1.0, 3.0).unwrap() - 2.0 * PI).abs() < 1e-9);
        assert!((delta_integral(1.0, 5.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn off_center_against_ring_closed_form() {
        for delta in [0.5, 0.2, 0.05, 0.01] {
            let v = delta_integral(delta, 4.0).unwrap();
            let o = delta_alpha4_oracle(delta);
            assert!(((v - o) / o).abs() < 1e-8, "δ={delta}: {v} vs {o}");
        }
    }

    #[test]
    fn decreasing_in_depth_and_divergent_at_boundary() {
        let mut previous = f64::INFINITY;
        for delta in [0.001, 0.01, 0.1, 0.3, 0.6, 1.0] {
            let v = delta_integral(delta, 4.0).unwrap();
            assert!(v < previous);
            previous = v;
        }
        assert!(delta_integral(0.001, 4.0).unwrap() > 1e3);
        assert!(delta_integral(0.0, 4.0).is_err());
        assert!(delta_integral(1.5, 4.0).is_err());
    }

    #[test]
    fn eta_closed_form_without_noise() {
        let c = noiseless(200.0);
        let lambda = density_from_spacing(200.0);
        let v = eta(1.0, &c).unwrap();
        let expect = 2.0 / (PI * lambda).powi(2);
        assert!(((v - expect) / expect).abs() < 1e-9);
        let mut c3 = c.clone();
        c3.alpha = 3.0;
        let expect = libm::tgamma(2.5) * (PI * lambda).powf(-1.5);
        assert!(((eta(1.0, &c3).unwrap() - expect) / expect).abs() < 1e-9);
    }

    #[test]
    fn eta_decreases_with_threshold_under_noise() {
        let c = NetworkConfig::from_spacing_and_area(200.0, 1.0).unwrap();
        let mut previous = f64::INFINITY;
        for t in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let v = eta(t, &c).unwrap();
            assert!(v < previous);
            previous = v;
        }
    }

    #[test]
    fn radius_closed_form_and_power_law() {
        let c = noiseless(200.0);
        let lambda = c.bs_density;
        let q = ScalingQuery::new(0.05, 1.0, 1.0, c.clone()).unwrap();
        let r = optimal_radius(&q).unwrap();
        assert!((r - (40.0 / (PI * lambda)).sqrt()).abs() < 1e-6);
        assert!((r - 632.456).abs() < 1e-3);
        let half = ScalingQuery::new(0.025, 1.0, 1.0, c).unwrap();
        assert!((optimal_radius(&half).unwrap() / r - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn radius_blows_up_as_alpha_approaches_two() {
        let mut previous = 0.0;
        for alpha in [3.0, 2.5, 2.2, 2.1] {
            let mut c = noiseless(200.0);
            c.alpha = alpha;
            let r = optimal_radius(&ScalingQuery::new(0.05, 1.0, 1.0, c).unwrap()).unwrap();
            assert!(r > previous);
            previous = r;
        }
        assert!(previous > 1e6);
    }

    #[test]
    fn cluster_size_is_density_free_without_noise() {
        let a = mean_cluster_size(&ScalingQuery::new(0.05, 1.0, 1.0, noiseless(200.0)).unwrap()).unwrap();
        let b = mean_cluster_size(&ScalingQuery::new(0.05, 1.0, 1.0, noiseless(400.0)).unwrap()).unwrap();
        assert!((a - 40.0).abs() < 1e-9);
        assert!((a - b).abs() < 1e-9);
        let r = optimal_radius(&ScalingQuery::new(0.05, 1.0, 1.0, noiseless(400.0)).unwrap()).unwrap();
        let lambda = density_from_spacing(400.0);
        assert!((lambda * PI * r * r - b).abs() < 1e-8);
    }

    #[test]
    fn pre_asymptotic_radius_is_close_for_small_epsilon() {
        let q = ScalingQuery::new(0.05, 1.0, 1.0, noiseless(200.0)).unwrap();
        let a = optimal_radius(&q).unwrap();
        let p = optimal_radius_pre_asymptotic(&q).unwrap();
        let size = |r: f64| q.config.bs_density * PI * r * r;
        assert!(((size(a) - size(p)) / size(a)).abs() < 0.03);
        let loose = ScalingQuery::new(0.99, 1.0, 1.0, noiseless(200.0)).unwrap();
        let r = optimal_radius_pre_asymptotic(&loose).unwrap();
        assert!(size(r) < 1.0);
    }

    #[test]
    fn numeric_radius_converges_to_law() {
        let c = NetworkConfig::from_spacing_and_area(200.0, 1.0).unwrap();
        let mut previous = 0.0;
        for eps in [0.2, 0.1, 0.05, 0.02] {
            let check = verify_scaling(&ScalingQuery::new(eps, 0.5, 1.0, c.clone()).unwrap()).unwrap();
            let gap = (check.ratio - 1.0).abs();
            assert!(check.ratio > previous && check.ratio < 1.0, "ε={eps}: {check:?}");
            previous = check.ratio;
            if eps == 0.02 {
                assert!(gap < 0.1);
            }
        }
    }

    #[test]
    fn boundary_coverage_grows_with_radius() {
        let c = noiseless(200.0);
        let q = ScalingQuery::new(0.05, 0.3, 1.0, c).unwrap();
        let mut previous = 0.0;
        for radius in [100.0, 300.0, 1000.0, 3000.0] {
            let p = boundary_coverage(&q, radius).unwrap();
            assert!(p > previous && p < 1.0);
            previous = p;
        }
        assert!(previous > 0.98);
    }

    #[test]
    fn query_ranges() {
        assert!(ScalingQuery::new(0.0, 1.0, 1.0, noiseless(200.0)).is_err());
        assert!(ScalingQuery::new(0.1, 0.0, 1.0, noiseless(200.0)).is_err());
        assert!(ScalingQuery::new(0.1, 1.1, 1.0, noiseless(200.0)).is_err());
    }
}
