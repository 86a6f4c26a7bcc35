//! Gauss-Legendre rules and composite integration.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 512;

/// A Gauss-Legendre rule on `[-1, 1]`; nodes ascend, weights are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissae and weights of the composite rule over `[a, b]` split into
    /// `panels` equal sub-intervals.
    pub fn points(&self, a: f64, b: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels).flat_map(move |p| {
            let mid = a + (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(x, w)| (mid + half * x, half * w))
        })
    }
}

/// Gauss-Legendre rule of the given order, by Newton iteration on the
/// three-term Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::config(
            "order",
            format!("Gauss-Legendre order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {order}"),
        ));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite quadrature of `f` over `[a, b]` with `panels` equal panels.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, rule: &QuadratureRule, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return Err(Error::domain(format!("integration bounds out of order: [{a}, {b}]")));
    }
    if panels == 0 {
        return Err(Error::config("panels", "at least one panel is required"));
    }
    let mut sum = 0.0;
    for (x, w) in rule.points(a, b, panels) {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { abscissa: x });
        }
        sum += w * y;
    }
    Ok(sum)
}
