//! Band solvers and finite-difference weights on non-uniform grids.

use crate::error::{ConeError, Result};

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(ConeError::param("rhs", "tridiagonal bands must share one length"));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(ConeError::Singular(0));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(ConeError::Singular(i));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// General band matrix with `kl` sub- and `ku` super-diagonals, solved by LU with
/// partial pivoting (fill-in widens the upper band to `kl + ku`).
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major storage; row `i` keeps columns `i-kl ..= i+kl+ku`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix { n, kl, ku, data: vec![0.0; n * (2 * kl + ku + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width() || j >= self.n {
            None
        } else {
            Some(i * self.width() + off as usize)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band kl={} ku={}", self.kl, self.ku));
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band kl={} ku={}", self.kl, self.ku));
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.data[k])
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`, consuming the matrix.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(ConeError::param("rhs", "length differs from matrix size"));
        }
        let mut x = b.to_vec();
        let kl = self.kl;
        let ku_fill = self.kl + self.ku;
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= 1e-300 * scale || !best.is_finite() {
                return Err(ConeError::Singular(k));
            }
            let last_col = (k + ku_fill).min(n - 1);
            if piv != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let c = self.get(piv, j);
                    self.set(k, j, c);
                    self.set(piv, j, a);
                }
                x.swap(k, piv);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let f = self.get(i, k) / pivot;
                if f == 0.0 {
                    continue;
                }
                self.set(i, k, 0.0);
                for j in k + 1..=last_col {
                    let v = self.get(k, j);
                    if v != 0.0 {
                        self.add(i, j, -f * v);
                    }
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + ku_fill).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=last_col {
                s -= self.get(k, j) * x[j];
            }
            x[k] = s / self.get(k, k);
        }
        Ok(x)
    }
}

/// Fornberg weights for derivatives of order `0..=m` at `z` from nodes `x`.
///
/// Returns `w[k][j]`, the weight of node `j` for the `k`-th derivative.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Index window of `width` consecutive nodes, as centred on `i` as the grid allows.
pub fn stencil_window(i: usize, len: usize, width: usize) -> std::ops::Range<usize> {
    let half = width / 2;
    let start = i.saturating_sub(half).min(len.saturating_sub(width));
    start..(start + width).min(len)
}

/// Derivative of order `k` of samples `y` on nodes `x`, using `width`-point stencils.
pub fn derivative(x: &[f64], y: &[f64], k: usize, width: usize) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let r = stencil_window(i, x.len(), width);
            let w = fd_weights(x[i], &x[r.clone()], k);
            r.clone().zip(&w[k]).map(|(j, wj)| wj * y[j]).sum()
        })
        .collect()
}

/// Composite trapezoid rule on a non-uniform grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// Trapezoid weights on a non-uniform grid.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_direct() {
        let n = 6;
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![4.0; n];
        let x_true: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = 4.0 * x_true[i];
                if i > 0 {
                    s -= x_true[i - 1];
                }
                if i + 1 < n {
                    s -= x_true[i + 1];
                }
                s
            })
            .collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn band_lu_needs_pivoting() {
        // Zero leading diagonal forces a row swap.
        let n = 5;
        let mut a = BandMatrix::zeros(n, 2, 2);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == j { if i == 0 { 0.0 } else { 5.0 } } else { 1.0 / (1.0 + (i + 2 * j) as f64) };
                a.set(i, j, v);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let b = a.mul_vec(&x_true);
        let x = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn fornberg_is_exact_on_polynomials() {
        let x = [0.0, 0.1, 0.35, 0.5, 0.9];
        let w = fd_weights(0.3, &x, 2);
        let f = |t: f64| 1.0 + 2.0 * t - t * t + 0.5 * t.powi(4);
        let d2: f64 = x.iter().zip(&w[2]).map(|(t, c)| c * f(*t)).sum();
        assert!((d2 - (-2.0 + 6.0 * 0.09)).abs() < 1e-10);
    }
}
