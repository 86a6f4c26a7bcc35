//! Disc-cluster geometry seen from a user at distance `r_u` from the
//! cluster center. Angles are measured from the outward radial direction
//! at the user, so the boundary is nearest at `φ = 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Distance from the user to the cluster boundary along direction `φ`.
pub fn chord_length(phi: f64, r_u: f64, radius: f64) -> Result<f64> {
    if !(0.0..=radius).contains(&r_u) {
        return Err(Error::domain(format!(
            "user radius {r_u} outside the cluster of radius {radius}"
        )));
    }
    Ok(exact_chord(phi, r_u, radius))
}

pub(crate) fn exact_chord(phi: f64, r_u: f64, radius: f64) -> f64 {
    let c = phi.cos();
    let disc = (r_u * r_u * c * c - r_u * r_u + radius * radius).max(0.0);
    disc.sqrt() - r_u * c
}

/// The boundary-distance form without the `−r_u²` term under the root. It
/// overestimates the true chord by up to `√(R² + r_u²) − R` at `φ = 0`.
pub fn published_chord_length(phi: f64, r_u: f64, radius: f64) -> f64 {
    let c = phi.cos();
    (r_u * r_u * c * c + radius * radius).sqrt() - r_u * c
}

/// Half-angle of the arc of the circle of radius `r_x` around the user that
/// lies outside the cluster.
pub fn wedge_angle(r_x: f64, r_u: f64, radius: f64) -> Result<f64> {
    let lo = radius - r_u;
    let hi = radius + r_u;
    let slack = 1e-9 * radius;
    if r_x < lo - slack || r_x > hi + slack || r_u <= 0.0 {
        return Err(Error::domain(format!(
            "radius {r_x} outside the boundary band [{lo}, {hi}] for user radius {r_u}"
        )));
    }
    Ok(wedge_unchecked(r_x, r_u, radius))
}

pub(crate) fn wedge_unchecked(r_x: f64, r_u: f64, radius: f64) -> f64 {
    if r_u <= 0.0 || r_x <= 0.0 {
        return if r_x >= radius { PI } else { 0.0 };
    }
    let c = ((r_x * r_x + r_u * r_u - radius * radius) / (2.0 * r_x * r_u)).clamp(-1.0, 1.0);
    PI - c.acos()
}

/// A function of direction sampled at the midpoints of `M` equal angular
/// sectors, integrated as a step function.
///
/// Only the half-turn `[0, π]` is stored: every integrand here is even in
/// `φ`. Arcs that end inside a sector take the covered fraction of it, which
/// keeps integrals continuous in their limits.
#[derive(Debug, Clone)]
pub(crate) struct SectorProfile {
    width: f64,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SectorProfile {
    pub(crate) fn build<F>(segments: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = segments / 2;
        let width = 2.0 * PI / segments as f64;
        let mut values = Vec::with_capacity(half);
        let mut cumulative = Vec::with_capacity(half + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..half {
            let v = f((k as f64 + 0.5) * width)?;
            acc += v * width;
            values.push(v);
            cumulative.push(acc);
        }
        Ok(Self {
            width,
            values,
            cumulative,
        })
    }

    fn primitive(&self, x: f64) -> f64 {
        let n = self.values.len();
        let x = x.clamp(0.0, PI);
        let k = ((x / self.width) as usize).min(n - 1);
        self.cumulative[k] + self.values[k] * (x - k as f64 * self.width)
    }

    /// Integral over `[a, b] ⊂ [0, π]`.
    pub(crate) fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.primitive(b) - self.primitive(a)
    }

    pub(crate) fn half_turn(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_endpoints() {
        let (r_u, radius) = (230.0, 564.0);
        assert!((chord_length(0.0, r_u, radius).unwrap() - (radius - r_u)).abs() < 1e-9);
        assert!((chord_length(PI, r_u, radius).unwrap() - (radius + r_u)).abs() < 1e-9);
        for phi in [0.0, 0.7, 2.0, 3.1] {
            assert!((chord_length(phi, 0.0, radius).unwrap() - radius).abs() < 1e-12);
        }
        assert!(chord_length(0.0, radius + 1.0, radius).is_err());
    }

    #[test]
    fn chord_lands_on_the_boundary() {
        let (r_u, radius): (f64, f64) = (400.0, 564.0);
        for i in 0..50 {
            let phi = i as f64 * 0.13;
            let d = chord_length(phi, r_u, radius).unwrap();
            let (x, y) = (r_u + d * phi.cos(), d * phi.sin());
            assert!(((x * x + y * y).sqrt() - radius).abs() < 1e-9);
        }
    }

    #[test]
    fn published_form_overshoots_at_the_near_side() {
        let (r_u, radius) = (300.0, 564.0);
        let exact = chord_length(0.0, r_u, radius).unwrap();
        let published = published_chord_length(0.0, r_u, radius);
        assert!(published > exact);
        assert!((published - ((radius * radius + r_u * r_u).sqrt() - r_u)).abs() < 1e-9);
    }

    #[test]
    fn wedge_limits() {
        let (r_u, radius) = (200.0, 500.0);
        assert!(wedge_angle(radius - r_u, r_u, radius).unwrap().abs() < 1e-7);
        assert!((wedge_angle(radius + r_u, r_u, radius).unwrap() - PI).abs() < 1e-7);
        let w = wedge_angle(1e-6, radius, radius).unwrap();
        assert!((w - PI / 2.0).abs() < 1e-6);
        assert!(wedge_angle(radius + r_u + 1.0, r_u, radius).is_err());
    }

    #[test]
    fn wedge_matches_chord() {
        // The circle of radius r_x crosses the boundary where the chord equals r_x.
        let (r_u, radius) = (250.0, 564.0);
        for r_x in [320.0, 500.0, 700.0, 800.0] {
            let w = wedge_angle(r_x, r_u, radius).unwrap();
            assert!((exact_chord(w, r_u, radius) - r_x).abs() < 1e-8);
        }
    }

    #[test]
    fn sector_integrals() {
        let p = SectorProfile::build(128, |phi| Ok(phi.cos().powi(2))).unwrap();
        assert!((p.half_turn() - PI / 2.0).abs() < 1e-12);
        let q = SectorProfile::build(8, |_| Ok(2.0)).unwrap();
        assert!((q.integral(0.1, 1.3) - 2.4).abs() < 1e-12);
        assert_eq!(q.integral(1.0, 0.5), 0.0);
        assert!((q.integral(0.0, PI) - 2.0 * PI).abs() < 1e-12);
    }
}
