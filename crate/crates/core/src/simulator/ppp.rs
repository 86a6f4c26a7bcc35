//! Poisson point sampling and nearest-point lookup.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

pub type Point = [f64; 2];

pub(crate) fn distance_sq(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    distance_sq(a, b).sqrt()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // Mean is positive and finite here, so construction cannot fail.
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

/// Homogeneous PPP of intensity `density` on the disc of radius `window`
/// about the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: f64, rng: &mut R) -> Vec<Point> {
    sample_annulus(density, 0.0, window, rng)
}

/// PPP restricted to the annulus `inner ≤ |x| < outer`.
pub fn sample_annulus<R: Rng + ?Sized>(density: f64, inner: f64, outer: f64, rng: &mut R) -> Vec<Point> {
    if outer <= inner {
        return Vec::new();
    }
    let (a2, b2) = (inner * inner, outer * outer);
    let count = poisson_count(density * PI * (b2 - a2), rng);
    (0..count)
        .map(|_| {
            let r = (a2 + (b2 - a2) * rng.random::<f64>()).sqrt();
            let (sin, cos) = (2.0 * PI * rng.random::<f64>()).sin_cos();
            [r * cos, r * sin]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poisson_mean_and_dispersion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let density = 3.1831e-5;
        let counts: Vec<f64> = (0..10_000).map(|_| sample_ppp(density, 2000.0, &mut rng).len() as f64).collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expect = density * PI * 2000.0 * 2000.0;
        assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
        assert!((var / mean - 1.0).abs() < 0.05, "dispersion {}", var / mean);
    }

    #[test]
    fn empty_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_ppp(1.0, 0.0, &mut rng).is_empty());
    }

    #[test]
    fn points_stay_in_annulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in sample_annulus(1e-3, 100.0, 300.0, &mut rng) {
            let r = p[0].hypot(p[1]);
            assert!((100.0..300.0).contains(&r));
        }
    }
}
