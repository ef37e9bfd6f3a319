//! Radial gluing of the Calabi potential to the model Tian–Yau potential, the residual of
//! the Kähler–Einstein equation on radial potentials, the collapsing mode operators and the
//! radial Newton solve.

use serde::{Deserialize, Serialize};

use crate::calabi::{AnsatzSign, PotentialProfile};
use crate::collapse::radial_length;
use crate::error::{ConeError, Result};
use crate::fit::{linear_fit, power_law_fit, ScalingFit};
use crate::linalg::{fd_weights, solve_tridiagonal, stencil_window, BandMatrix};
use crate::quad::{integrate, QuadOptions};

/// Quintic smoothstep `χ` with `χ = 0` on `(−∞, 1/2]` and `χ = 1` on `[2, ∞)`, and its
/// first four derivatives.
pub fn cutoff(y: f64) -> [f64; 5] {
    if y <= 0.5 {
        return [0.0; 5];
    }
    if y >= 2.0 {
        return [1.0, 0.0, 0.0, 0.0, 0.0];
    }
    let k = 1.0 / 1.5;
    let x = (y - 0.5) * k;
    let x2 = x * x;
    let x3 = x2 * x;
    [
        x3 * (10.0 + x * (-15.0 + 6.0 * x)),
        k * 30.0 * x2 * (1.0 - x) * (1.0 - x),
        k * k * 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
        k * k * k * 60.0 * (1.0 - 6.0 * x + 6.0 * x2),
        k * k * k * k * 60.0 * (-6.0 + 12.0 * x),
    ]
}

/// Parameters of the glued potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlueConfig {
    pub n: u32,
    pub beta: f64,
    pub mu: f64,
}

impl GlueConfig {
    pub fn new(n: u32, beta: f64, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(ConeError::param("n", "dimension must be at least 1"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ConeError::param("beta", format!("must lie in (0, 1), got {beta}")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(ConeError::param("mu", format!("must lie in (0, 1), got {mu}")));
        }
        let cfg = GlueConfig { n, beta, mu };
        Ok(cfg)
    }

    /// `t_β = −β^{−1+μ}`.
    pub fn t_beta(&self) -> f64 {
        -self.beta.powf(self.mu - 1.0)
    }

    /// `1 + 1/n`.
    pub fn m(&self) -> f64 {
        1.0 + 1.0 / f64::from(self.n)
    }

    /// `C_β = −log(n+1) + (n+1) log β`.
    pub fn c_beta(&self) -> f64 {
        -f64::from(self.n + 1).ln() + f64::from(self.n + 1) * self.beta.ln()
    }

    pub fn zone(&self, t: f64) -> GlueZone {
        let tb = self.t_beta();
        if t <= 2.0 * tb {
            GlueZone::Calabi
        } else if t < 0.5 * tb {
            GlueZone::Glue
        } else {
            GlueZone::TianYau
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlueZone {
    Calabi,
    Glue,
    TianYau,
}

/// A glue configuration with its positive-sign profile.
#[derive(Debug, Clone)]
pub struct GlueModel {
    pub cfg: GlueConfig,
    pub profile: PotentialProfile,
}

/// Value and four `t`-derivatives of a radial potential.
pub type Jet5 = [f64; 5];

impl GlueModel {
    pub fn new(cfg: GlueConfig) -> Result<Self> {
        Ok(GlueModel { cfg, profile: PotentialProfile::new(cfg.n, AnsatzSign::Positive)? })
    }

    pub fn with_profile(cfg: GlueConfig, profile: PotentialProfile) -> Result<Self> {
        if profile.sign() != AnsatzSign::Positive || profile.n() != cfg.n {
            return Err(ConeError::param("profile", "must be the positive-sign profile of dimension n"));
        }
        Ok(GlueModel { cfg, profile })
    }

    /// `φ_{β,L}(t) = φ₁(βt)` and its `t`-derivatives.
    pub fn calabi_jet(&self, t: f64) -> Result<Jet5> {
        let b = self.cfg.beta;
        let j = self.profile.jet(b * t)?;
        Ok([j.phi, b * j.d[0], b * b * j.d[1], b.powi(3) * j.d[2], b.powi(4) * j.d[3]])
    }

    /// `β^{1+1/n}(−nt/(n+1))^{1+1/n}` and its `t`-derivatives.
    pub fn tian_yau_jet(&self, t: f64) -> Jet5 {
        let m = self.cfg.m();
        let nf = f64::from(self.cfg.n);
        let c = self.cfg.beta.powf(m) * (nf / (nf + 1.0)).powf(m);
        let mut out = [0.0; 5];
        let mut coef = c;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = coef * (-t).powf(m - k as f64);
            coef *= -(m - k as f64);
        }
        out
    }

    /// `χ(t/t_β)` and its `t`-derivatives.
    pub fn cutoff_jet(&self, t: f64) -> Jet5 {
        let tb = self.cfg.t_beta();
        let c = cutoff(t / tb);
        let mut out = [0.0; 5];
        for k in 0..5 {
            out[k] = c[k] / tb.powi(k as i32);
        }
        out
    }

    /// The glued potential `χφ_{β,L} + (1−χ)β^{1+1/n}φ_TY` with exact derivatives.
    pub fn glued_jet(&self, t: f64) -> Result<Jet5> {
        if !(t < 0.0) {
            return Err(ConeError::Domain(format!("t must be negative, got {t}")));
        }
        let ty = self.tian_yau_jet(t);
        let c = self.cutoff_jet(t);
        if c[0] == 0.0 && c.iter().all(|v| *v == 0.0) {
            return Ok(ty);
        }
        let cal = self.calabi_jet(t)?;
        if c[0] == 1.0 && c[1..].iter().all(|v| *v == 0.0) {
            return Ok(cal);
        }
        let diff: Vec<f64> = cal.iter().zip(&ty).map(|(a, b)| a - b).collect();
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut out = ty;
        for k in 0..5 {
            for i in 0..=k {
                out[k] += BINOM[k][i] * c[i] * diff[k - i];
            }
        }
        Ok(out)
    }

    pub fn glued_potential(&self, t: f64) -> Result<f64> {
        Ok(self.glued_jet(t)?[0])
    }

    /// `R = log((−φ')^{n−1}φ'') + φ − C_β` and its first two `t`-derivatives.
    pub fn residual_jet(&self, jet: &Jet5) -> Result<[f64; 3]> {
        let [f, d1, d2, d3, d4] = *jet;
        if !(d1 < 0.0 && d2 > 0.0) {
            return Err(ConeError::Domain(format!(
                "(−φ')^{{n−1}}φ'' is not positive (φ' = {d1}, φ'' = {d2}); the glue is inadmissible"
            )));
        }
        let nm1 = f64::from(self.cfg.n) - 1.0;
        let r0 = nm1 * (-d1).ln() + d2.ln() + f - self.cfg.c_beta();
        let r1 = nm1 * d2 / d1 + d3 / d2 + d1;
        let r2 = nm1 * (d3 / d1 - (d2 / d1).powi(2)) + d4 / d2 - (d3 / d2).powi(2) + d2;
        Ok([r0, r1, r2])
    }

    pub fn glued_residual(&self, t: f64) -> Result<[f64; 3]> {
        self.residual_jet(&self.glued_jet(t)?)
    }

    /// `g_tt` of `β^{1+1/n} g_TY,L`, the metric in which glue-zone derivatives are measured.
    pub fn tian_yau_gtt(&self, t: f64) -> f64 {
        0.5 * self.tian_yau_jet(t)[2]
    }

    /// Weight `w_β = χ(−u) − (1 − χ(−u))u` at `u = βt`.
    pub fn weight(&self, t: f64) -> f64 {
        let u = self.cfg.beta * t;
        let c = cutoff(-u)[0];
        c - (1.0 - c) * u
    }
}

/// Discretized scalar on a one-dimensional grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub variable: RadialVariable,
    pub metric: MetricTag,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialVariable {
    T,
    U,
    V,
    S,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricTag {
    CalabiModel,
    TianYauModel,
    BakryEmery,
    FlatCone,
}

impl RadialField {
    pub fn new(variable: RadialVariable, metric: MetricTag, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(ConeError::param("values", "length differs from grid"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConeError::param("grid", "must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ConeError::NonFinite("radial field values".into()));
        }
        Ok(RadialField { variable, metric, grid, values })
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Per-zone suprema of the residual and of its weighted version `w_β^{δ+1+1/n}|R|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneSup {
    pub zone: GlueZone,
    pub sup_residual: f64,
    pub sup_weighted: f64,
    pub points: usize,
}

pub fn residual_zone_sups(model: &GlueModel, t_grid: &[f64], delta: f64) -> Result<[ZoneSup; 3]> {
    let zones = [GlueZone::Calabi, GlueZone::Glue, GlueZone::TianYau];
    let mut out = zones.map(|zone| ZoneSup { zone, sup_residual: 0.0, sup_weighted: 0.0, points: 0 });
    let power = delta + model.cfg.m();
    for &t in t_grid {
        let r = model.glued_residual(t)?[0].abs();
        let k = match model.cfg.zone(t) {
            GlueZone::Calabi => 0,
            GlueZone::Glue => 1,
            GlueZone::TianYau => 2,
        };
        out[k].sup_residual = out[k].sup_residual.max(r);
        out[k].sup_weighted = out[k].sup_weighted.max(model.weight(t).powf(power) * r);
        out[k].points += 1;
    }
    Ok(out)
}

/// Glue-zone suprema at one `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueZoneSample {
    pub beta: f64,
    /// `−βt_β = β^μ`, the abscissa of the scaling fits.
    pub scale: f64,
    pub potential_difference: [f64; 3],
    pub residual: [f64; 3],
    pub cutoff: [f64; 3],
    pub weighted_residual: f64,
}

/// Fitted exponents in `β^μ` for each derivative order, plus the weighted residual in `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualScan {
    pub n: u32,
    pub mu: f64,
    pub samples: Vec<GlueZoneSample>,
    pub potential_difference: Vec<ScalingFit>,
    pub residual: Vec<ScalingFit>,
    /// Orders 1 and 2 (order 0 is constant).
    pub cutoff: Vec<ScalingFit>,
    pub weighted_residual: ScalingFit,
}

/// Measures glue-zone derivative norms in the `β^{1+1/n}g_TY,L` sense over a `β` sweep.
pub fn residual_scaling_scan(profile: &PotentialProfile, n: u32, mu: f64, betas: &[f64], delta: f64) -> Result<ResidualScan> {
    if betas.len() < 3 {
        return Err(ConeError::TooFewPoints { needed: 3, got: betas.len() });
    }
    let samples = betas
        .iter()
        .map(|&beta| glue_zone_sample(profile, GlueConfig::new(n, beta, mu)?, delta))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = samples.iter().map(|s| s.scale).collect();
    let fit_col = |pick: &dyn Fn(&GlueZoneSample) -> f64| -> Result<ScalingFit> {
        let ys: Vec<f64> = samples.iter().map(pick).collect();
        power_law_fit(&xs, &ys, 3)
    };
    let mut potential_difference = Vec::new();
    let mut residual = Vec::new();
    let mut cut = Vec::new();
    for j in 0..3 {
        potential_difference.push(fit_col(&|s| s.potential_difference[j])?);
        residual.push(fit_col(&|s| s.residual[j])?);
        if j > 0 {
            cut.push(fit_col(&|s| s.cutoff[j])?);
        }
    }
    let bs: Vec<f64> = samples.iter().map(|s| s.beta).collect();
    let ws: Vec<f64> = samples.iter().map(|s| s.weighted_residual).collect();
    Ok(ResidualScan {
        n,
        mu,
        samples,
        potential_difference,
        residual,
        cutoff: cut,
        weighted_residual: power_law_fit(&bs, &ws, 3)?,
    })
}

fn glue_zone_sample(profile: &PotentialProfile, cfg: GlueConfig, delta: f64) -> Result<GlueZoneSample> {
    let model = GlueModel::with_profile(cfg, profile.clone())?;
    let tb = cfg.t_beta();
    let (a, b) = (2.0 * tb, 0.5 * tb);
    let pts = 801;
    let mut pd = [0.0_f64; 3];
    let mut res = [0.0_f64; 3];
    let mut cut = [0.0_f64; 3];
    let mut weighted = 0.0_f64;
    for k in 0..pts {
        // Geometric spacing across the zone.
        let t = a * (b / a).powf(k as f64 / (pts - 1) as f64);
        let g = model.glued_jet(t)?;
        let l = model.calabi_jet(t)?;
        let r = model.residual_jet(&g)?;
        let c = model.cutoff_jet(t);
        let gtt = model.tian_yau_gtt(t);
        for j in 0..3 {
            let scale = gtt.powf(0.5 * j as f64);
            pd[j] = pd[j].max((g[j] - l[j]).abs() / scale);
            res[j] = res[j].max(r[j].abs() / scale);
            cut[j] = cut[j].max(c[j].abs() / scale);
        }
        weighted = weighted.max(model.weight(t).powf(delta + cfg.m()) * r[0].abs());
    }
    Ok(GlueZoneSample {
        beta: cfg.beta,
        scale: -cfg.beta * tb,
        potential_difference: pd,
        residual: res,
        cutoff: cut,
        weighted_residual: weighted,
    })
}

fn nodes_per_wavelength_check(grid: &[f64], beta: f64, ell: u32) -> Result<()> {
    if ell == 0 {
        return Ok(());
    }
    let wavelength = beta / f64::from(ell);
    let h = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
    if 4.0 * h > wavelength {
        return Err(ConeError::GridTooCoarse(format!(
            "spacing {h:e} gives fewer than 4 points per wavelength β/ℓ = {wavelength:e}"
        )));
    }
    Ok(())
}

/// Second-order difference weights `(first, second)` at node `i` of a non-uniform grid.
fn second_order_weights(grid: &[f64], i: usize) -> (std::ops::Range<usize>, Vec<f64>, Vec<f64>) {
    let len = grid.len();
    let r = if i == 0 || i + 1 == len { stencil_window(i, len, 4) } else { i - 1..i + 2 };
    let w = fd_weights(grid[i], &grid[r.clone()], 2);
    (r, w[1].clone(), w[2].clone())
}

/// `(2/φ₁'')(F'' − ℓ²F/(4β²)) + (2(n−1)/φ₁')F'`, the `ℓ`-th circle mode of the Laplacian of
/// `g_β` on `D`-invariant functions of `u`.
pub fn mode_operator_apply(profile: &PotentialProfile, beta: f64, ell: u32, field: &RadialField) -> Result<RadialField> {
    if profile.sign() != AnsatzSign::Positive {
        return Err(ConeError::Domain("the mode operator is built on the positive-sign model".into()));
    }
    if field.variable != RadialVariable::U {
        return Err(ConeError::param("field", "mode operator acts on fields in the u variable"));
    }
    if field.grid.len() < 4 || field.grid.iter().any(|&u| u >= 0.0) {
        return Err(ConeError::Domain("need at least 4 nodes, all with u < 0".into()));
    }
    nodes_per_wavelength_check(&field.grid, beta, ell)?;
    let nm1 = f64::from(profile.n()) - 1.0;
    let k2 = f64::from(ell * ell) / (4.0 * beta * beta);
    let values = (0..field.grid.len())
        .map(|i| {
            let d = profile.derivatives(field.grid[i])?;
            let (r, w1, w2) = second_order_weights(&field.grid, i);
            let f1: f64 = r.clone().zip(&w1).map(|(j, w)| w * field.values[j]).sum();
            let f2: f64 = r.zip(&w2).map(|(j, w)| w * field.values[j]).sum();
            Ok(2.0 / d.d2 * (f2 - k2 * field.values[i]) + 2.0 * nm1 / d.d1 * f1)
        })
        .collect::<Result<Vec<_>>>()?;
    RadialField::new(RadialVariable::U, MetricTag::CalabiModel, field.grid.clone(), values)
}

/// Result of the Dirichlet problem for one circle mode on a distance shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub beta: f64,
    pub ell: u32,
    pub u0: f64,
    pub eps: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub sup_inner: f64,
    /// `cosh(½εγ(ℓ/β)u0)/cosh(εγ(ℓ/β)u0)`.
    pub barrier: f64,
    /// `(β/ℓ²)/w_β(u0)`.
    pub bound: f64,
    pub ratio_to_bound: f64,
    pub nodes: usize,
}

/// Solves `u ↦ r₀(u) = target` for the distance to `u = 0`, which decreases in `u`.
fn solve_distance(profile: &PotentialProfile, target: f64) -> Result<f64> {
    let total = radial_length(profile, f64::NEG_INFINITY, 0.0)?;
    if !(target > 0.0 && target < total) {
        return Err(ConeError::Domain(format!("distance {target} is outside (0, {total})")));
    }
    let mut lo = -1.0;
    while radial_length(profile, lo, 0.0)? < target {
        lo *= 2.0;
        if lo < -1e4 {
            return Err(ConeError::RootFinding("distance shell reaches the divisor".into()));
        }
    }
    let mut hi = -1e-300_f64.max(1e-14);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if radial_length(profile, mid, 0.0)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-13 * lo.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn cosh_ratio(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

pub fn mode_decay_check(profile: &PotentialProfile, beta: f64, ell: u32, u0: f64, eps: f64, gamma: f64) -> Result<DecayReport> {
    if ell == 0 {
        return Err(ConeError::param("ell", "decay is asserted for ℓ ≥ 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ConeError::param("eps", "must lie in (0, 1)"));
    }
    if !(u0 < 0.0) {
        return Err(ConeError::param("u0", "must be negative"));
    }
    let r0 = radial_length(profile, u0, 0.0)?;
    let u_left = solve_distance(profile, (1.0 + eps) * r0)?;
    let u_right = solve_distance(profile, (1.0 - eps) * r0)?;
    let in_left = solve_distance(profile, (1.0 + 0.5 * eps) * r0)?;
    let in_right = solve_distance(profile, (1.0 - 0.5 * eps) * r0)?;
    let kappa = f64::from(ell) / (2.0 * beta);
    let width = u_right - u_left;
    let nodes = ((width * kappa * 64.0).ceil() as usize).max(4001);
    let h = width / (nodes - 1) as f64;
    let grid: Vec<f64> = (0..nodes).map(|i| u_left + h * i as f64).collect();
    nodes_per_wavelength_check(&grid, beta, ell)?;
    let nm1 = f64::from(profile.n()) - 1.0;
    // F'' + (n−1)(φ''/φ')F' − κ²F = 0, F = 1 at both ends.
    let mut lower = vec![0.0; nodes];
    let mut diag = vec![1.0; nodes];
    let mut upper = vec![0.0; nodes];
    let mut rhs = vec![0.0; nodes];
    rhs[0] = 1.0;
    rhs[nodes - 1] = 1.0;
    for i in 1..nodes - 1 {
        let d = profile.derivatives(grid[i])?;
        let b = nm1 * d.d2 / d.d1;
        lower[i] = 1.0 / (h * h) - b / (2.0 * h);
        upper[i] = 1.0 / (h * h) + b / (2.0 * h);
        diag[i] = -2.0 / (h * h) - kappa * kappa;
    }
    let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let sup_inner = grid
        .iter()
        .zip(&sol)
        .filter(|(u, _)| **u >= in_left && **u <= in_right)
        .fold(0.0_f64, |m, (_, f)| m.max(f.abs()));
    let arg = eps * gamma * f64::from(ell) / beta * u0;
    let barrier = cosh_ratio(0.5 * arg, arg);
    let w = {
        let c = cutoff(-u0)[0];
        c - (1.0 - c) * u0
    };
    let bound = beta / f64::from(ell * ell) / w;
    Ok(DecayReport {
        beta,
        ell,
        u0,
        eps,
        u_left,
        u_right,
        sup_inner,
        barrier,
        bound,
        ratio_to_bound: sup_inner / bound,
        nodes,
    })
}

/// `f ↦ f''/φ₁'' + (n−1)f'/φ₁' + f`, the radial limit operator `2Δ_{v∞} + 1`.
pub fn limit_operator_apply(profile: &PotentialProfile, field: &RadialField) -> Result<Vec<f64>> {
    let nm1 = f64::from(profile.n()) - 1.0;
    (1..field.grid.len() - 1)
        .map(|i| {
            let d = profile.derivatives(field.grid[i])?;
            let (r, w1, w2) = second_order_weights(&field.grid, i);
            let f1: f64 = r.clone().zip(&w1).map(|(j, w)| w * field.values[j]).sum();
            let f2: f64 = r.zip(&w2).map(|(j, w)| w * field.values[j]).sum();
            Ok(f2 / d.d2 + nm1 * f1 / d.d1 + field.values[i])
        })
        .collect()
}

/// Window in `u` over which [`kernel_solutions`] measures the residual: away from the
/// `(−u)^{1/n}` endpoint and from the `e^u` tail, where differencing is roundoff-limited.
pub const KERNEL_CHECK_WINDOW: (f64, f64) = (-12.0, -0.5);

/// `φ₁''·(limit operator f)` at interior nodes inside `window`, divided by the sum of the
/// absolute values of its three terms plus `φ₁''|f'|`.
pub fn limit_operator_relative(profile: &PotentialProfile, field: &RadialField, window: (f64, f64)) -> Result<Vec<f64>> {
    let nm1 = f64::from(profile.n()) - 1.0;
    (1..field.grid.len() - 1)
        .filter(|&i| field.grid[i] >= window.0 && field.grid[i] <= window.1)
        .map(|i| {
            let d = profile.derivatives(field.grid[i])?;
            let (r, w1, w2) = second_order_weights(&field.grid, i);
            let f1: f64 = r.clone().zip(&w1).map(|(j, w)| w * field.values[j]).sum();
            let f2: f64 = r.zip(&w2).map(|(j, w)| w * field.values[j]).sum();
            let terms = [f2, nm1 * d.d2 / d.d1 * f1, d.d2 * field.values[i]];
            // The φ₁''|f'| term keeps the scale away from zero where f and f'' vanish together.
            let scale: f64 = terms.iter().map(|x| x.abs()).sum::<f64>() + d.d2 * f1.abs();
            Ok(terms.iter().sum::<f64>() / scale)
        })
        .collect()
}

/// The two radial solutions of the limit equation and the checks made on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub first: RadialField,
    pub second: RadialField,
    /// Sup of [`limit_operator_relative`] over [`KERNEL_CHECK_WINDOW`].
    pub residual_first: f64,
    pub residual_second: f64,
    /// Linear fit of the second solution over the part of the grid with `u ≤ −20`.
    pub slope_second: Option<ScalingFit>,
    /// `∫ φ₁' φ₁'' (φ₁')^{n−1} du` over `(−∞, 0)`.
    pub orthogonality: f64,
    /// `(−1)^n/(n+1)` from `x = −φ₁'`.
    pub orthogonality_expected: f64,
}

/// `φ₁'` and `g|φ₁'|` with `g(u) = ∫_{−1}^{u} du/(1 − e^{−φ₁})`, normalized so that the second
/// solution grows like `+u` at `−∞`.
pub fn kernel_solutions(profile: &PotentialProfile, u_grid: &[f64]) -> Result<KernelReport> {
    if profile.sign() != AnsatzSign::Positive {
        return Err(ConeError::Domain("kernel solutions are computed for the positive sign".into()));
    }
    if u_grid.len() < 8 || u_grid.windows(2).any(|w| !(w[1] > w[0])) || u_grid[u_grid.len() - 1] >= 0.0 {
        return Err(ConeError::param("u_grid", "need ≥ 8 increasing negative nodes"));
    }
    let integrand = |u: f64| -> f64 {
        match profile.eval_phi1(u) {
            Ok(phi) => 1.0 / (-(-phi).exp_m1()),
            Err(_) => f64::NAN,
        }
    };
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 2000 };
    // Cumulative integral from the node nearest −1, accumulated outward in both directions.
    let anchor = u_grid.iter().enumerate().min_by(|a, b| (a.1 + 1.0).abs().total_cmp(&(b.1 + 1.0).abs())).map(|p| p.0).unwrap_or(0);
    let mut g = vec![0.0; u_grid.len()];
    g[anchor] = integrate(integrand, -1.0, u_grid[anchor], opts)?.value;
    for i in anchor + 1..u_grid.len() {
        g[i] = g[i - 1] + integrate(integrand, u_grid[i - 1], u_grid[i], opts)?.value;
    }
    for i in (0..anchor).rev() {
        g[i] = g[i + 1] - integrate(integrand, u_grid[i], u_grid[i + 1], opts)?.value;
    }
    let mut first = Vec::with_capacity(u_grid.len());
    let mut second = Vec::with_capacity(u_grid.len());
    for (i, &u) in u_grid.iter().enumerate() {
        let d = profile.derivatives(u)?;
        first.push(d.d1);
        second.push(-g[i] * d.d1);
    }
    let first = RadialField::new(RadialVariable::U, MetricTag::BakryEmery, u_grid.to_vec(), first)?;
    let second = RadialField::new(RadialVariable::U, MetricTag::BakryEmery, u_grid.to_vec(), second)?;
    let rel = |f: &RadialField| -> Result<f64> {
        let r = limit_operator_relative(profile, f, KERNEL_CHECK_WINDOW)?;
        Ok(r.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
    };
    let residual_first = rel(&first)?;
    let residual_second = rel(&second)?;
    let (tail_u, tail_f): (Vec<f64>, Vec<f64>) =
        u_grid.iter().zip(&second.values).filter(|(u, _)| **u <= -20.0).map(|(u, f)| (*u, *f)).unzip();
    let slope_second = if tail_u.len() >= 8 { Some(linear_fit(&tail_u, &tail_f, 8)?) } else { None };
    let orthogonality = orthogonality_integral(profile)?;
    let n = profile.n();
    let orthogonality_expected = if n % 2 == 0 { 1.0 } else { -1.0 } / f64::from(n + 1);
    Ok(KernelReport {
        first,
        second,
        residual_first,
        residual_second,
        slope_second,
        orthogonality,
        orthogonality_expected,
    })
}

/// `∫_{−∞}^0 φ₁' φ₁'' (φ₁')^{n−1} du`, integrated in `y = e^{u/2}`.
pub fn orthogonality_integral(profile: &PotentialProfile) -> Result<f64> {
    let n = profile.n() as i32;
    let f = |y: f64| -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match profile.derivatives(2.0 * y.ln()) {
            Ok(d) => d.d1.powi(n) * d.d2 * 2.0 / y,
            Err(_) => f64::NAN,
        }
    };
    Ok(integrate(f, 0.0, 1.0, QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 4000 })?.value)
}

/// Options for [`newton_solve_radial`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub damping: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Number of grid nodes.
    pub nodes: usize,
    /// Finite-difference stencil width (odd).
    pub stencil: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { damping: 1.0, max_iter: 30, tol: 1e-10, nodes: 2049, stencil: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub field: RadialField,
    /// Sup of the discrete residual before each step, ending with the final one.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// Sup of `final − initial`.
    pub correction_sup: f64,
}

/// Grid in `t` for the radial solve: `u = βt` runs over `[−3, −β/2]`, equispaced in `log(−u)`.
pub fn newton_grid(cfg: &GlueConfig, nodes: usize) -> Vec<f64> {
    let (a, b) = (3.0_f64.ln(), (0.5 * cfg.beta).ln());
    (0..nodes).map(|i| -(a + (b - a) * i as f64 / (nodes - 1) as f64).exp() / cfg.beta).collect()
}

type Stencil = (std::ops::Range<usize>, Vec<f64>, Vec<f64>);

/// Residual and Jacobian of the discrete system in the correction `v = φ − φ_glued`.
///
/// Rows 0 and 1 pin `v` and `v'` at the left node; row `i + 1` is `R` at node `i`. Only `v` is
/// differenced, the glued jet is exact, so the roundoff floor scales with `|v|`.
fn discrete_system(cfg: &GlueConfig, base: &[[f64; 3]], stencils: &[Stencil], v: &[f64], v_left: f64) -> Result<(Vec<f64>, BandMatrix, f64)> {
    let n = base.len();
    let nm1 = f64::from(cfg.n) - 1.0;
    let band = stencils.iter().enumerate().map(|(i, w)| (i + 1).abs_diff(w.0.start).max((w.0.end - 1).abs_diff(i + 1))).max().unwrap_or(2);
    let mut jac = BandMatrix::zeros(n, band, band);
    let mut res = vec![0.0; n];
    let mut sup = 0.0_f64;
    res[0] = v[0] - v_left;
    jac.set(0, 0, 1.0);
    let (r, w1, _) = &stencils[0];
    res[1] = r.clone().zip(w1).map(|(j, w)| w * v[j]).sum::<f64>();
    for (j, w) in r.clone().zip(w1) {
        jac.set(1, j, *w);
    }
    for node in 1..n - 1 {
        let row = node + 1;
        let (r, w1, w2) = &stencils[node];
        let d1 = base[node][1] + r.clone().zip(w1).map(|(j, w)| w * v[j]).sum::<f64>();
        let d2 = base[node][2] + r.clone().zip(w2).map(|(j, w)| w * v[j]).sum::<f64>();
        if !(d1 < 0.0 && d2 > 0.0) {
            return Err(ConeError::NewtonDiverged { iterations: 0, residual: f64::INFINITY });
        }
        let value = nm1 * (-d1).ln() + d2.ln() + base[node][0] + v[node] - cfg.c_beta();
        res[row] = value;
        sup = sup.max(value.abs());
        for (k, j) in r.clone().enumerate() {
            jac.add(row, j, nm1 * w1[k] / d1 + w2[k] / d2);
        }
        jac.add(row, node, 1.0);
    }
    Ok((res, jac, sup))
}

/// Newton iteration for the radial Kähler–Einstein equation `R(φ) = 0` on the grid of
/// `initial`, linearized by `v ↦ v''/φ'' + (n−1)v'/φ' + v`.
///
/// The value and slope at the left end, deep in the Calabi zone, are pinned to those of the
/// initial potential and of the glued potential respectively.
pub fn newton_solve_radial(model: &GlueModel, initial: &RadialField, opts: NewtonOptions) -> Result<NewtonOutcome> {
    let cfg = model.cfg;
    let grid = &initial.grid;
    let n = grid.len();
    if initial.variable != RadialVariable::T || n < opts.stencil + 2 || grid[n - 1] >= 0.0 {
        return Err(ConeError::param("initial", "need a field in t < 0 with enough nodes"));
    }
    if opts.stencil < 3 || opts.stencil % 2 == 0 {
        return Err(ConeError::param("stencil", "must be odd and at least 3"));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(ConeError::param("damping", "must lie in (0, 1]"));
    }
    let stencils: Vec<Stencil> = (0..n)
        .map(|i| {
            let r = stencil_window(i, n, opts.stencil);
            let w = fd_weights(grid[i], &grid[r.clone()], 2);
            (r, w[1].clone(), w[2].clone())
        })
        .collect();
    let base = grid
        .iter()
        .map(|&t| model.glued_jet(t).map(|j| [j[0], j[1], j[2]]))
        .collect::<Result<Vec<_>>>()?;
    let mut v: Vec<f64> = initial.values.iter().zip(&base).map(|(f, b)| f - b[0]).collect();
    let v_left = v[0];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let (res, jac, sup) = discrete_system(&cfg, &base, &stencils, &v, v_left).map_err(|e| match e {
            ConeError::NewtonDiverged { .. } => ConeError::NewtonDiverged { iterations, residual: f64::INFINITY },
            other => other,
        })?;
        trace.push(sup);
        if sup < opts.tol {
            break;
        }
        if iterations >= opts.max_iter || !sup.is_finite() {
            return Err(ConeError::NewtonDiverged { iterations, residual: sup });
        }
        let step = jac.solve(&res)?;
        for (x, s) in v.iter_mut().zip(&step) {
            *x -= opts.damping * s;
        }
        iterations += 1;
    }
    let phi: Vec<f64> = v.iter().zip(&base).map(|(x, b)| x + b[0]).collect();
    let correction_sup = phi.iter().zip(&initial.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(NewtonOutcome {
        field: RadialField::new(RadialVariable::T, MetricTag::CalabiModel, grid.clone(), phi)?,
        trace,
        iterations,
        correction_sup,
    })
}

/// Samples the glued potential on [`newton_grid`].
pub fn glued_field(model: &GlueModel, nodes: usize) -> Result<RadialField> {
    let grid = newton_grid(&model.cfg, nodes);
    let values = grid.iter().map(|&t| model.glued_potential(t)).collect::<Result<Vec<_>>>()?;
    RadialField::new(RadialVariable::T, MetricTag::CalabiModel, grid, values)
}

/// Samples `φ_{β,L}` on the same grid.
pub fn calabi_field(model: &GlueModel, nodes: usize) -> Result<RadialField> {
    let grid = newton_grid(&model.cfg, nodes);
    let values = grid.iter().map(|&t| model.profile.eval_phi1(model.cfg.beta * t)).collect::<Result<Vec<_>>>()?;
    RadialField::new(RadialVariable::T, MetricTag::CalabiModel, grid, values)
}

/// Discrete residual `R(φ)` of a sampled potential in `t`, using `stencil`-point differences.
pub fn radial_residual(cfg: &GlueConfig, field: &RadialField, stencil: usize) -> Result<RadialField> {
    if field.variable != RadialVariable::T {
        return Err(ConeError::param("field", "residual is defined for fields in t"));
    }
    let grid = &field.grid;
    let n = grid.len();
    let nm1 = f64::from(cfg.n) - 1.0;
    let values = (0..n)
        .map(|i| {
            let r = stencil_window(i, n, stencil);
            let w = fd_weights(grid[i], &grid[r.clone()], 2);
            let d1: f64 = r.clone().zip(&w[1]).map(|(j, c)| c * field.values[j]).sum();
            let d2: f64 = r.zip(&w[2]).map(|(j, c)| c * field.values[j]).sum();
            if !(d1 < 0.0 && d2 > 0.0) {
                return Err(ConeError::Domain(format!("(−φ')^{{n−1}}φ'' is not positive at t = {}", grid[i])));
            }
            Ok(nm1 * (-d1).ln() + d2.ln() + field.values[i] - cfg.c_beta())
        })
        .collect::<Result<Vec<_>>>()?;
    RadialField::new(RadialVariable::T, field.metric, grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_monotone_c2_step() {
        assert_eq!(cutoff(0.5), [0.0; 5]);
        assert_eq!(cutoff(2.0)[0], 1.0);
        let mut prev = 0.0;
        for k in 0..=300 {
            let y = 0.5 + 1.5 * k as f64 / 300.0;
            let c = cutoff(y);
            assert!(c[0] >= prev - 1e-15);
            prev = c[0];
        }
        // First and second derivatives vanish at both breakpoints.
        for y in [0.5 + 1e-9, 2.0 - 1e-9] {
            let c = cutoff(y);
            assert!(c[1].abs() < 1e-12 && c[2].abs() < 1e-6);
        }
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        let h = 1e-5;
        for y in [0.7, 1.1, 1.9] {
            for k in 0..4 {
                let fd = (cutoff(y + h)[k] - cutoff(y - h)[k]) / (2.0 * h);
                assert!((fd - cutoff(y)[k + 1]).abs() < 1e-5, "order {k} at {y}");
            }
        }
    }

    #[test]
    fn branches_are_exact_outside_the_glue_zone() {
        let model = GlueModel::new(GlueConfig::new(2, 0.1, 0.8).unwrap()).unwrap();
        let tb = model.cfg.t_beta();
        for t in [4.0 * tb, 2.0 * tb] {
            let r = model.glued_residual(t).unwrap();
            assert!(r[0].abs() < 1e-12, "{r:?}");
        }
        // On the Tian–Yau side the log term is the Ricci-flat constant, leaving the potential.
        for t in [0.5 * tb, 0.1 * tb] {
            let r = model.glued_residual(t).unwrap()[0];
            let ty = model.tian_yau_jet(t)[0];
            assert!((r - ty).abs() < 1e-13, "{r} vs {ty}");
        }
    }

    #[test]
    fn inadmissible_glue_rejected() {
        assert!(GlueConfig::new(2, 1.0, 0.5).is_err());
        assert!(GlueConfig::new(2, 0.1, 1.0).is_err());
        assert!(GlueConfig::new(0, 0.1, 0.5).is_err());
        assert!(GlueConfig::new(2, 0.1, 0.8).is_ok());
    }
}
