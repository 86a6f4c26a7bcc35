//! The two reference curves: a conventional network with no cooperation and
//! an ideal network where every BS cooperates, leaving only noise.

use std::f64::consts::PI;

use super::kernel::Interference;
use crate::error::Result;
use crate::model::{nearest_distance_cutoff, NetworkConfig};
use crate::numerics::{gauss_legendre, integrate_1d};

const ORDER: usize = 16;
const PANELS: usize = 16;
const TAIL: f64 = 1e-16;

/// Success probability of a user served at `r_b` when every other BS
/// interferes. The reference the averaged baseline is tested against.
#[cfg(test)]
pub(crate) fn nocloud_kernel(config: &NetworkConfig, threshold: f64, r_b: f64) -> Result<f64> {
    let kernel = Interference::new(config.alpha, threshold);
    let exponent = 2.0 * PI * config.bs_density * kernel.beyond(r_b, r_b)?;
    Ok(kernel.noise_factor(config.normalized_noise(), r_b) * (-exponent).exp())
}

pub(crate) fn nocloud_at(config: &NetworkConfig, threshold: f64) -> Result<f64> {
    let kernel = Interference::new(config.alpha, threshold);
    // Interference beyond r_b scales the nearest-distance exponent by 1 + 2TΛ(1,T)/(α−2).
    let per_r2 = if threshold > 0.0 { kernel.beyond(1.0, 1.0)? } else { 0.0 };
    let effective = config.bs_density * (1.0 + 2.0 * per_r2);
    let top = nearest_distance_cutoff(effective, TAIL).min(kernel.noise_support(config.normalized_noise()));
    let rule = gauss_legendre(ORDER)?;
    let noise = config.normalized_noise();
    integrate_1d(
        |r| 2.0 * PI * config.bs_density * r * (-PI * effective * r * r).exp() * kernel.noise_factor(noise, r),
        0.0,
        top,
        &rule,
        PANELS,
    )
}

pub(crate) fn ideal_at(config: &NetworkConfig, threshold: f64) -> Result<f64> {
    let kernel = Interference::new(config.alpha, threshold);
    let density = config.bs_density;
    let noise = config.normalized_noise();
    let top = nearest_distance_cutoff(density, TAIL).min(kernel.noise_support(noise));
    let rule = gauss_legendre(ORDER)?;
    integrate_1d(
        |r| 2.0 * PI * density * r * (-PI * density * r * r).exp() * kernel.noise_factor(noise, r),
        0.0,
        top,
        &rule,
        PANELS,
    )
}
