//! The interference kernel `Λ(ρ, T) = ₂F₁(1, (α−2)/α; 2−2/α; −ρ^α T)`.
//!
//! With `b = (α−2)/α` the parameters satisfy `c = b + 1`, so the kernel is
//! `b ∫₀¹ t^{b−1} / (1 + x t) dt` with `x = ρ^α T ≥ 0`. Three evaluation
//! routes cover `x ∈ [0, ∞)` with geometric convergence:
//!
//! * `x < 0.9`: the Gauss series at `z = −x`.
//! * `0.9 ≤ x ≤ 9`: the Pfaff transformation, which maps `z` to
//!   `z / (z − 1) = x / (1 + x) ∈ [0.47, 0.9]`.
//! * `x > 9`: the connection formula about `z = ∞`, a series in `−1/x`.
//!
//! The Pfaff series alone degrades to algebraic convergence as `x → ∞`
//! (its argument approaches 1 and `c − a − b < 0`), which is why the third
//! route exists.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const REL_TOL: f64 = 1e-15;
const SERIES_LIMIT: f64 = 0.9;
const PFAFF_LIMIT: f64 = 9.0;

/// Arguments of the interference kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaKernelArgs {
    /// Ratio of the serving distance to the interference exclusion radius.
    pub rho: f64,
    /// Linear SINR threshold.
    pub threshold: f64,
    /// Pathloss exponent.
    pub alpha: f64,
}

impl LambdaKernelArgs {
    pub fn new(rho: f64, threshold: f64, alpha: f64) -> Result<Self> {
        let args = Self {
            rho,
            threshold,
            alpha,
        };
        args.validate()?;
        Ok(args)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::domain(format!(
                "pathloss exponent must exceed 2, got {}",
                self.alpha
            )));
        }
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::domain(format!(
                "threshold must be finite and non-negative, got {}",
                self.threshold
            )));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::domain(format!(
                "distance ratio must be positive and finite, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// `x = ρ^α T`, the magnitude of the hypergeometric argument.
    fn magnitude(&self) -> f64 {
        self.rho.powf(self.alpha) * self.threshold
    }
}

/// Evaluation route for [`lambda_kernel_via`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPath {
    Series,
    Pfaff,
    Inversion,
}

impl KernelPath {
    fn select(x: f64) -> Self {
        if x < SERIES_LIMIT {
            KernelPath::Series
        } else if x <= PFAFF_LIMIT {
            KernelPath::Pfaff
        } else {
            KernelPath::Inversion
        }
    }
}

/// Gauss hypergeometric series `₂F₁(a, b; c; z)` for `|z| < 1`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::domain(format!(
            "hypergeometric series needs |z| < 1, got {z}"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() <= REL_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        partial_sum: sum,
        terms: MAX_TERMS,
    })
}

/// `Λ(ρ, T)`, in `(0, 1]`, with the route chosen from `ρ^α T`.
pub fn lambda_kernel(args: &LambdaKernelArgs) -> Result<f64> {
    args.validate()?;
    let x = args.magnitude();
    evaluate(KernelPath::select(x), x, args.alpha)
}

/// `Λ(ρ, T)` along a forced route. Routes outside their convergence band
/// return a domain or convergence error rather than a wrong value.
pub fn lambda_kernel_via(args: &LambdaKernelArgs, path: KernelPath) -> Result<f64> {
    args.validate()?;
    evaluate(path, args.magnitude(), args.alpha)
}

fn evaluate(path: KernelPath, x: f64, alpha: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let b = (alpha - 2.0) / alpha;
    let c = b + 1.0;
    match path {
        KernelPath::Series => hyp2f1_series(1.0, b, c, -x),
        KernelPath::Pfaff => {
            // ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)) with c − b = 1.
            let w = x / (1.0 + x);
            Ok(hyp2f1_series(1.0, 1.0, c, w)? / (1.0 + x))
        }
        KernelPath::Inversion => {
            if x <= 1.0 {
                return Err(Error::domain(format!(
                    "inversion route needs ρ^α T > 1, got {x}"
                )));
            }
            let leading = PI * b / (PI * b).sin() * x.powf(-b);
            let tail = b / (1.0 - b) / x * hyp2f1_series(1.0, 1.0 - b, 2.0 - b, -1.0 / x)?;
            Ok(leading - tail)
        }
    }
}
