use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Root of `f` on a bracketing interval.
///
/// Secant steps are taken while they stay inside the current bracket and
/// shrink it by at least half every other step; otherwise the step bisects.
/// Stops when `|f(x)| ≤ tol` or the bracket is narrower than `tol`.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut last_width = (b - a).abs();
    for iteration in 0..MAX_ITERATIONS {
        let width = (b - a).abs();
        let secant = b - fb * (b - a) / (fb - fa);
        let inside = secant > a.min(b) && secant < a.max(b);
        let forced_bisection = iteration % 2 == 1 && width > 0.5 * last_width;
        let x = if inside && !forced_bisection {
            secant
        } else {
            0.5 * (a + b)
        };
        if iteration % 2 == 1 {
            last_width = width;
        }
        let fx = f(x);
        if fx.abs() <= tol || width <= tol {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::NonFinite { abscissa: x });
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear() {
        let r = find_root(|x| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((r - 1.414_213_562_4).abs() < 1e-9);
    }

    #[test]
    fn median_of_a_cdf() {
        let cdf = |x: f64| 1.0 - (-x).exp();
        let m = find_root(|x| cdf(x) - 0.5, 0.0, 10.0, 1e-13).unwrap();
        assert!((m - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn flat_then_steep_function_still_converges() {
        let r = find_root(|x| (x - 0.3).powi(9), -1.0, 4.0, 1e-30).unwrap();
        assert!((r - 0.3).abs() < 1e-3);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9),
            Err(Error::NoSignChange { .. })
        ));
    }
}
