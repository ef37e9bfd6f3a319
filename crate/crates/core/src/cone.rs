//! The flat cone `dr² + β²r²dθ²` on the disk `r ≤ R`: polar grids, the discrete Laplacian,
//! a Fourier-mode Poisson solver and the Green representation used to cross-check it.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ConeError, Result};
use crate::linalg::{fd_weights, stencil_window, BandMatrix};
use crate::quad::{integrate, integrate_with_breaks, QuadOptions};

use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeDisk {
    pub beta: f64,
    /// Outer radius in the cone variable `r = |z|^β`.
    pub radius: f64,
    pub alpha: f64,
}

impl ConeDisk {
    pub fn new(beta: f64, radius: f64, alpha: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(ConeError::param("beta", format!("cone angle parameter must lie in (0, 1/2), got {beta}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ConeError::param("radius", "must be positive"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ConeError::param("alpha", "Hölder exponent must lie in (0, 1)"));
        }
        Ok(ConeDisk { beta, radius, alpha })
    }

    /// The disk `r ≤ 1/2` with `α = 1/2`.
    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(beta, 0.5, 0.5)
    }

    /// `|z|/R^{1/β}` for a cone radius `r`, computed in log form.
    fn flat_modulus(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            ((r / self.radius).ln() / self.beta).exp()
        }
    }
}

/// Tensor grid: radii `0 = r_0 < … < r_N = R` and `n_theta` equispaced angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub r: Vec<f64>,
    pub n_theta: usize,
}

impl PolarGrid {
    /// `r_i = R·sin^{γ}(πi/2N)` with `γ = min(1/β, 4)`: graded like `(i/N)^γ` at the apex and
    /// quadratically clustered at `r = R`, where the modes `r^{k/β}` form boundary layers.
    pub fn graded(disk: &ConeDisk, n_r: usize, n_theta: usize) -> Result<Self> {
        let gamma = (1.0 / disk.beta).min(4.0);
        let r = (0..=n_r)
            .map(|i| {
                if i == n_r {
                    disk.radius
                } else {
                    disk.radius * (0.5 * PI * i as f64 / n_r as f64).sin().powf(gamma)
                }
            })
            .collect();
        Self::new(r, n_theta)
    }

    pub fn new(r: Vec<f64>, n_theta: usize) -> Result<Self> {
        if n_theta < 64 {
            return Err(ConeError::GridTooCoarse(format!("{n_theta} angular nodes, need at least 64")));
        }
        if r.len() < 8 || r[0] != 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConeError::GridTooCoarse("radii must start at 0, increase, and number at least 8".into()));
        }
        Ok(PolarGrid { r, n_theta })
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Samples on a [`PolarGrid`], row-major in `(r, θ)`. The `r = 0` row repeats the apex value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarField {
    pub grid: PolarGrid,
    pub values: Vec<f64>,
}

impl PolarField {
    pub fn from_fn(grid: &PolarGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &r in &grid.r {
            for j in 0..grid.n_theta {
                values.push(f(r, grid.theta(j)));
            }
        }
        PolarField { grid: grid.clone(), values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_theta + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.n_theta;
        &self.values[i * m..(i + 1) * m]
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_finite(&self) -> Result<()> {
        if self.values.len() != self.grid.len() {
            return Err(ConeError::param("field", "sample count differs from grid size"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(ConeError::NonFinite("polar field".into()));
        }
        Ok(())
    }
}

/// Second-order `∂_r² + r^{−1}∂_r + β^{−2}r^{−2}∂_θ²` on the grid. The apex row uses only the
/// circle mean of the first ring, `4(ū(r_1) − u(0))/r_1²`; the outer row is left at zero.
pub fn laplacian_apply(disk: &ConeDisk, u: &PolarField) -> Result<PolarField> {
    u.check_finite()?;
    let g = &u.grid;
    let m = g.n_theta;
    let nr = g.r.len();
    let dth = TAU / m as f64;
    let mut out = vec![0.0; u.values.len()];
    let mean1 = u.row(1).iter().sum::<f64>() / m as f64;
    let apex = 4.0 * (mean1 - u.at(0, 0)) / (g.r[1] * g.r[1]);
    out[..m].iter_mut().for_each(|v| *v = apex);
    let b2 = disk.beta * disk.beta;
    for i in 1..nr - 1 {
        let (rm, r0, rp) = (g.r[i - 1], g.r[i], g.r[i + 1]);
        let w = fd_weights(r0, &[rm, r0, rp], 2);
        for j in 0..m {
            let (a, b, c) = (u.at(i - 1, j), u.at(i, j), u.at(i + 1, j));
            let ur = w[1][0] * a + w[1][1] * b + w[1][2] * c;
            let urr = w[2][0] * a + w[2][1] * b + w[2][2] * c;
            let uth = (u.at(i, (j + 1) % m) - 2.0 * b + u.at(i, (j + m - 1) % m)) / (dth * dth);
            out[i * m + j] = urr + ur / r0 + uth / (b2 * r0 * r0);
        }
    }
    Ok(PolarField { grid: g.clone(), values: out })
}

/// Per-mode diagnostics from [`poisson_solve_modes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSolveReport {
    pub modes: usize,
    /// Share of the data energy in the upper quarter of the resolved modes.
    pub tail_energy: f64,
}

/// Options for [`poisson_solve_modes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSolveOptions {
    /// Stencil width of the radial differences (odd).
    pub stencil: usize,
    /// Largest acceptable tail energy share before the solve is rejected.
    pub max_tail_energy: f64,
}

impl Default for ModeSolveOptions {
    fn default() -> Self {
        ModeSolveOptions { stencil: 5, max_tail_energy: 1e-12 }
    }
}

fn ring_fft(grid: &PolarGrid, rows: impl Iterator<Item = Vec<f64>>) -> Vec<Vec<Complex64>> {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(grid.n_theta);
    let scale = 1.0 / grid.n_theta as f64;
    rows.map(|row| {
        let mut buf: Vec<Complex64> = row.into_iter().map(|v| Complex64::new(v * scale, 0.0)).collect();
        fft.process(&mut buf);
        buf
    })
    .collect()
}

/// Solves `Δu = f` on the disk with `u = boundary` on `r = R` by splitting into circle modes.
///
/// Each mode `k` solves `u_k'' + u_k'/r − (k/β)²u_k/r² = f_k` with `u_k'(0) = 0` for `k = 0`
/// and `u_k(0) = 0` otherwise, using `stencil`-point differences on the radial grid.
pub fn poisson_solve_modes(
    disk: &ConeDisk,
    f: &PolarField,
    boundary: &[f64],
    opts: ModeSolveOptions,
) -> Result<(PolarField, ModeSolveReport)> {
    f.check_finite()?;
    let g = &f.grid;
    let m = g.n_theta;
    if boundary.len() != m {
        return Err(ConeError::param("boundary", format!("expected {m} samples, got {}", boundary.len())));
    }
    if boundary.iter().any(|v| !v.is_finite()) {
        return Err(ConeError::NonFinite("boundary data".into()));
    }
    let nr = g.r.len();
    let rows = (0..nr).map(|i| f.row(i).to_vec());
    let fk = ring_fft(g, rows);
    let gk = ring_fft(g, std::iter::once(boundary.to_vec())).pop().expect("one row");
    let kmax = m / 2;
    let tail_energy = {
        let energy = |k: usize| -> f64 { fk.iter().map(|row| row[k].norm_sqr()).sum::<f64>() + gk[k].norm_sqr() };
        let total: f64 = (0..=kmax).map(energy).sum();
        let tail: f64 = (3 * kmax / 4..=kmax).map(energy).sum();
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    };
    if tail_energy > opts.max_tail_energy {
        return Err(ConeError::ModeTruncation(tail_energy));
    }
    let stencils: Vec<_> = (0..nr)
        .map(|i| {
            let r = stencil_window(i, nr, opts.stencil);
            let w = fd_weights(g.r[i], &g.r[r.clone()], 2);
            (r, w)
        })
        .collect();
    let mut modes = vec![vec![Complex64::new(0.0, 0.0); m]; nr];
    for k in 0..=kmax {
        let nu2 = (k as f64 / disk.beta).powi(2);
        let band = opts.stencil;
        let mut a = BandMatrix::zeros(nr, band, band);
        let mut re = vec![0.0; nr];
        let mut im = vec![0.0; nr];
        if k == 0 {
            let (r, w) = &stencils[0];
            for (j, c) in r.clone().zip(&w[1]) {
                a.set(0, j, *c);
            }
        } else {
            a.set(0, 0, 1.0);
        }
        for i in 1..nr - 1 {
            let ri = g.r[i];
            let (r, w) = &stencils[i];
            for (idx, j) in r.clone().enumerate() {
                a.add(i, j, w[2][idx] + w[1][idx] / ri);
            }
            a.add(i, i, -nu2 / (ri * ri));
            re[i] = fk[i][k].re;
            im[i] = fk[i][k].im;
        }
        a.set(nr - 1, nr - 1, 1.0);
        re[nr - 1] = gk[k].re;
        im[nr - 1] = gk[k].im;
        let sre = a.clone().solve(&re)?;
        let sim = a.solve(&im)?;
        for i in 0..nr {
            let c = Complex64::new(sre[i], sim[i]);
            modes[i][k] = c;
            if k > 0 && k < m - k {
                modes[i][m - k] = c.conj();
            }
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(m);
    let mut values = Vec::with_capacity(nr * m);
    for mut row in modes {
        ifft.process(&mut row);
        values.extend(row.iter().map(|c| c.re));
    }
    Ok((PolarField { grid: g.clone(), values }, ModeSolveReport { modes: kmax + 1, tail_energy }))
}

/// Tolerances for [`green_representation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenOptions {
    pub inner_tol: f64,
    pub outer_tol: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions { inner_tol: 1e-11, outer_tol: 1e-10 }
    }
}

/// `log|(z−w)/(1−w̄z)|` for `z = (r/R)^{1/β}e^{iθ}`, `w = (s/R)^{1/β}e^{iψ}` in the unit disk.
fn green_kernel(disk: &ConeDisk, r: f64, theta: f64, s: f64, psi: f64) -> f64 {
    let b = disk.beta;
    let lr = disk.radius.ln();
    let d = theta - psi;
    let sin2 = (0.5 * d).sin().powi(2);
    if r <= 0.0 || s <= 0.0 {
        let x = r.max(s);
        return if x <= 0.0 { f64::NEG_INFINITY } else { (x.ln() - lr) / b };
    }
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    let log_max = (hi.ln() - lr) / b;
    let q = ((lo.ln() - hi.ln()) / b).exp();
    let near = 0.5 * ((1.0 - q).powi(2) + 4.0 * q * sin2).ln();
    let p = ((r.ln() + s.ln() - 2.0 * lr) / b).exp();
    let far = 0.5 * ((1.0 - p).powi(2) + 4.0 * p * sin2).ln();
    log_max + near - far
}

/// `v(z) = h(z) + (2π)^{−1} ∫ G(z, w) f(w) dA_ḡ(w)` with the Dirichlet Green function of the
/// unit disk in the flat coordinate and `h` the Poisson integral of the boundary data.
pub fn green_representation(
    disk: &ConeDisk,
    f: &dyn Fn(f64, f64) -> f64,
    boundary: &dyn Fn(f64) -> f64,
    r: f64,
    theta: f64,
    opts: GreenOptions,
) -> Result<f64> {
    if !(0.0..=disk.radius).contains(&r) {
        return Err(ConeError::Domain(format!("r = {r} lies outside the disk")));
    }
    let inner = QuadOptions { abs_tol: opts.inner_tol, rel_tol: opts.inner_tol, max_panels: 2000 };
    let outer = QuadOptions { abs_tol: opts.outer_tol, rel_tol: opts.outer_tol, max_panels: 2000 };
    let h = if r >= disk.radius {
        boundary(theta)
    } else {
        let a = disk.flat_modulus(r);
        let poisson = |psi: f64| {
            let sin2 = (0.5 * (theta - psi)).sin().powi(2);
            (1.0 - a * a) / ((1.0 - a).powi(2) + 4.0 * a * sin2) * boundary(psi)
        };
        integrate_with_breaks(poisson, theta - PI, theta + PI, &[theta], inner)?.value / TAU
    };
    let mut failure: Option<ConeError> = None;
    let ring = |s: f64| -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let integrand = |psi: f64| f(s, psi) * green_kernel(disk, r, theta, s, psi);
        match integrate_with_breaks(integrand, theta - PI, theta + PI, &[theta], inner) {
            Ok(v) => v.value * disk.beta * s,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let volume = integrate_with_breaks(ring, 0.0, disk.radius, &[r], outer);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(h + volume?.value / TAU)
}

/// Circle average of `u` at radius `r`, by adaptive quadrature.
pub fn circle_mean(u: &dyn Fn(f64, f64) -> f64, r: f64) -> Result<f64> {
    Ok(integrate(|t| u(r, t), 0.0, TAU, QuadOptions::with_tol(1e-13, 1e-13))?.value / TAU)
}

/// A field transported to the cylinder `t = log r`, where `ḡ_β = r²(dt² + β²dθ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderField {
    pub beta: f64,
    pub t: Vec<f64>,
    pub n_theta: usize,
    pub values: Vec<f64>,
}

/// Drops the apex row and relabels the radii by `t = log r`.
pub fn cylinder_transform(disk: &ConeDisk, u: &PolarField) -> Result<CylinderField> {
    u.check_finite()?;
    let m = u.grid.n_theta;
    let rows: Vec<usize> = (0..u.grid.r.len()).filter(|&i| u.grid.r[i] > 0.0).collect();
    if rows.len() < 3 {
        return Err(ConeError::GridTooCoarse("need three rings away from the apex".into()));
    }
    let t = rows.iter().map(|&i| u.grid.r[i].ln()).collect();
    let values = rows.iter().flat_map(|&i| u.row(i).to_vec()).collect();
    Ok(CylinderField { beta: disk.beta, t, n_theta: m, values })
}

impl CylinderField {
    /// `∂_t² + β^{−2}∂_θ²` at interior rows (second order), row-major like the input.
    pub fn laplacian(&self) -> Vec<Vec<f64>> {
        let m = self.n_theta;
        let dth = TAU / m as f64;
        let b2 = self.beta * self.beta;
        (1..self.t.len() - 1)
            .map(|i| {
                let w = fd_weights(self.t[i], &self.t[i - 1..=i + 1], 2);
                (0..m)
                    .map(|j| {
                        let at = |ii: usize, jj: usize| self.values[ii * m + jj];
                        let utt = w[2][0] * at(i - 1, j) + w[2][1] * at(i, j) + w[2][2] * at(i + 1, j);
                        let uth = (at(i, (j + 1) % m) - 2.0 * at(i, j) + at(i, (j + m - 1) % m)) / (dth * dth);
                        utt + uth / b2
                    })
                    .collect()
            })
            .collect()
    }

    /// `g_c`-gradient norm at interior rows by central differences.
    pub fn gradient_norm(&self) -> Vec<Vec<f64>> {
        let m = self.n_theta;
        let dth = TAU / m as f64;
        (1..self.t.len() - 1)
            .map(|i| {
                let w = fd_weights(self.t[i], &self.t[i - 1..=i + 1], 1);
                (0..m)
                    .map(|j| {
                        let at = |ii: usize, jj: usize| self.values[ii * m + jj];
                        let ut = w[1][0] * at(i - 1, j) + w[1][1] * at(i, j) + w[1][2] * at(i + 1, j);
                        let uth = (at(i, (j + 1) % m) - at(i, (j + m - 1) % m)) / (2.0 * dth);
                        (ut * ut + (uth / self.beta).powi(2)).sqrt()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_invariants() {
        assert!(ConeDisk::new(0.5, 0.5, 0.5).is_err());
        assert!(ConeDisk::new(0.2, 0.5, 1.0).is_err());
        assert!(PolarGrid::graded(&ConeDisk::standard(0.2).unwrap(), 40, 32).is_err());
    }

    #[test]
    fn quadratic_has_laplacian_four() {
        let disk = ConeDisk::standard(0.3).unwrap();
        let grid = PolarGrid::graded(&disk, 60, 64).unwrap();
        let u = PolarField::from_fn(&grid, |r, _| r * r);
        let l = laplacian_apply(&disk, &u).unwrap();
        for i in 0..grid.r.len() - 1 {
            assert!((l.at(i, 5) - 4.0).abs() < 1e-9, "row {i}: {}", l.at(i, 5));
        }
    }

    #[test]
    fn constant_source_radial_solution() {
        let disk = ConeDisk::standard(0.2).unwrap();
        let grid = PolarGrid::graded(&disk, 200, 64).unwrap();
        let f = PolarField::from_fn(&grid, |_, _| 1.0);
        let (u, _) = poisson_solve_modes(&disk, &f, &vec![0.0; 64], ModeSolveOptions::default()).unwrap();
        for (i, &r) in grid.r.iter().enumerate() {
            assert!((u.at(i, 3) - (r * r - 0.25) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn green_kernel_is_nonpositive() {
        let disk = ConeDisk::standard(0.25).unwrap();
        for &(r, s, d) in &[(0.1, 0.2, 0.3), (0.49, 0.3, 3.0), (0.2, 0.2, 1e-3)] {
            assert!(green_kernel(&disk, r, 0.0, s, d) <= 0.0);
        }
    }
}
