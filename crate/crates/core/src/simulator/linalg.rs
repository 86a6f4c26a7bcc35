//! Complex LQ factorization by Householder reflections.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major. Rows are users and columns are BSs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::domain(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("channel matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn mul(&self, other: &ChannelMatrix) -> ChannelMatrix {
        let mut out = ChannelMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ChannelMatrix {
        let mut out = ChannelMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Householder triangularization of the columns of `a` (`m × n`, `m ≥ n`),
/// in place. Returns the reflector vectors and the diagonal of `R`.
fn householder(a: &mut ChannelMatrix) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
    let (m, n) = (a.rows, a.cols);
    let mut reflectors = Vec::with_capacity(n);
    let mut diagonal = Vec::with_capacity(n);
    for k in 0..n {
        let norm = (k..m).map(|i| a.get(i, k).norm_sqr()).sum::<f64>().sqrt();
        let x0 = a.get(k, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..m).map(|i| a.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|z| *z /= vnorm);
            for j in k..n {
                let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * a.get(k + t, j)).sum();
                for (t, vt) in v.iter().enumerate() {
                    let updated = a.get(k + t, j) - 2.0 * vt * dot;
                    a.set(k + t, j, updated);
                }
            }
        }
        diagonal.push(a.get(k, k));
        reflectors.push(v);
    }
    (reflectors, diagonal)
}

/// `H = L·Q` with `L` lower-triangular (`n × n`) and `Q` (`n × m`) having
/// orthonormal rows, for `n ≤ m`.
///
/// Factorizes `Hᴴ = Q̃ R` and returns `L = Rᴴ`, `Q = Q̃ᴴ`.
pub fn lq_decompose(h: &ChannelMatrix) -> Result<(ChannelMatrix, ChannelMatrix)> {
    let (n, m) = (h.rows, h.cols);
    if n == 0 {
        return Err(Error::domain("LQ decomposition of an empty matrix"));
    }
    if n > m {
        return Err(Error::domain(format!("LQ needs at most as many rows as columns, got {n}x{m}")));
    }
    let mut a = h.adjoint();
    let (reflectors, _) = householder(&mut a);

    let mut l = ChannelMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            l.set(i, j, a.get(j, i).conj());
        }
    }
    // Thin Q̃ = H₁ H₂ ⋯ Hₙ applied to the first n unit vectors.
    let mut q_tilde = ChannelMatrix::zeros(m, n);
    for j in 0..n {
        q_tilde.set(j, j, Complex64::new(1.0, 0.0));
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * q_tilde.get(k + t, j)).sum();
            for (t, vt) in v.iter().enumerate() {
                let updated = q_tilde.get(k + t, j) - 2.0 * vt * dot;
                q_tilde.set(k + t, j, updated);
            }
        }
    }
    Ok((l, q_tilde.adjoint()))
}

/// `|l_kk|` for the last of the first `k + 1` rows: the component of row `k`
/// orthogonal to the rows encoded before it.
pub(crate) fn last_lq_diagonal(h: &ChannelMatrix, k: usize) -> f64 {
    let mut leading = ChannelMatrix::zeros(k + 1, h.cols);
    leading.entries.copy_from_slice(&h.entries[..(k + 1) * h.cols]);
    let mut a = leading.adjoint();
    let (_, diagonal) = householder(&mut a);
    diagonal[k].norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(n: usize, m: usize, values: &[(f64, f64)]) -> ChannelMatrix {
        ChannelMatrix::new(n, m, values.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
    }

    fn max_abs_diff(a: &ChannelMatrix, b: &ChannelMatrix) -> f64 {
        a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    fn determinant(h: &ChannelMatrix) -> Complex64 {
        let n = h.rows;
        let mut a = h.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a.get(x, k).norm().total_cmp(&a.get(y, k).norm())).unwrap();
            if p != k {
                for j in 0..n {
                    let (u, w) = (a.get(k, j), a.get(p, j));
                    a.set(k, j, w);
                    a.set(p, j, u);
                }
                det = -det;
            }
            let pivot = a.get(k, k);
            det *= pivot;
            for i in k + 1..n {
                let f = a.get(i, k) / pivot;
                for j in k..n {
                    let v = a.get(i, j) - f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n)
    }

    proptest! {
        #[test]
        fn reconstructs_and_is_unitary(values in entries(16)) {
            let h = matrix(4, 4, &values);
            let (l, q) = lq_decompose(&h).unwrap();
            prop_assert!(max_abs_diff(&l.mul(&q), &h) <= 1e-10 * h.frobenius_norm().max(1.0));
            let eye = q.mul(&q.adjoint());
            let mut id = ChannelMatrix::zeros(4, 4);
            for i in 0..4 { id.set(i, i, Complex64::new(1.0, 0.0)); }
            prop_assert!(max_abs_diff(&eye, &id) < 1e-10);
            for i in 0..4 {
                for j in i + 1..4 {
                    prop_assert_eq!(l.get(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }

        #[test]
        fn determinant_modulus_is_diagonal_product(values in entries(25)) {
            let h = matrix(5, 5, &values);
            let (l, _) = lq_decompose(&h).unwrap();
            let product: f64 = (0..5).map(|i| l.get(i, i).norm()).product();
            let det = determinant(&h).norm();
            prop_assert!((product - det).abs() <= 1e-8 * det.max(1e-12));
        }

        #[test]
        fn leading_rows_fix_the_diagonal(values in entries(24), k in 0usize..4) {
            let h = matrix(4, 6, &values);
            let (l, _) = lq_decompose(&h).unwrap();
            prop_assert!((last_lq_diagonal(&h, k) - l.get(k, k).norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn lower_triangular_input_keeps_its_pattern() {
        let h = matrix(3, 3, &[(2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 1.0), (0.0, -3.0), (0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (4.0, 2.0)]);
        let (l, q) = lq_decompose(&h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((q.get(i, j).norm() - expect).abs() < 1e-12);
                assert!((l.get(i, j).norm() - h.get(i, j).norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_errors() {
        assert!(lq_decompose(&ChannelMatrix::zeros(0, 0)).is_err());
        assert!(lq_decompose(&ChannelMatrix::zeros(3, 2)).is_err());
        assert!(ChannelMatrix::new(2, 2, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
