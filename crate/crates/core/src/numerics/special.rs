use std::f64::consts::PI;

/// Error function, absolute error below 1e-15 on the real line.
///
/// Uses `erf(x) = 2/√π · e^{−x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!`, whose terms are
/// all positive, so there is no cancellation. Beyond |x| = 6 the result is
/// ±1 to double precision.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax >= 6.0 {
        return x.signum();
    }
    let x2 = ax * ax;
    let mut term = ax;
    let mut sum = ax;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    let v = (2.0 / PI.sqrt() * (-x2).exp() * sum).min(1.0);
    v.copysign(x)
}
