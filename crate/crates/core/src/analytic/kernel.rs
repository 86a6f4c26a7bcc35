use crate::error::Result;
use crate::numerics::{lambda_kernel, LambdaKernelArgs};

/// Terms `e^{−T σ² r_b^α}` below `e^{−NOISE_CUTOFF}` are treated as zero.
pub(crate) const NOISE_CUTOFF: f64 = 40.0;

/// Laplace-transform exponent of the interference seen by a user served
/// at distance `r_b`, for one threshold.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Interference {
    alpha: f64,
    threshold: f64,
}

impl Interference {
    pub(crate) fn new(alpha: f64, threshold: f64) -> Self {
        Self { alpha, threshold }
    }

    /// Per unit density and per radian: interferers start at distance `edge`
    /// along the ray, i.e. `T r_b^α edge^{2−α} Λ(r_b/edge, T) / (α−2)`.
    pub(crate) fn beyond(&self, r_b: f64, edge: f64) -> Result<f64> {
        if self.threshold == 0.0 {
            return Ok(0.0);
        }
        let rho = r_b / edge;
        let lambda = lambda_kernel(&LambdaKernelArgs {
            rho,
            threshold: self.threshold,
            alpha: self.alpha,
        })?;
        Ok(self.threshold * r_b * r_b * rho.powf(self.alpha - 2.0) * lambda / (self.alpha - 2.0))
    }

    /// Noise-only success probability `e^{−T σ² r_b^α}`.
    pub(crate) fn noise_factor(&self, noise: f64, r_b: f64) -> f64 {
        (-self.threshold * noise * r_b.powf(self.alpha)).exp()
    }

    /// Serving distance beyond which the noise factor is negligible.
    pub(crate) fn noise_support(&self, noise: f64) -> f64 {
        if noise > 0.0 && self.threshold > 0.0 {
            (NOISE_CUTOFF / (self.threshold * noise)).powf(1.0 / self.alpha)
        } else {
            f64::INFINITY
        }
    }
}
