//! The collapsing model metric `g_β = 2φ₁''(u)(du²/4 + β²η²) − βσφ₁'(u) g_D` in frame
//! coefficients, the moment-map coordinates and the curvature quantities of the model.

use serde::{Deserialize, Serialize};

use crate::calabi::{AnsatzSign, PotentialProfile};
use crate::error::{ConeError, Result};
use crate::fit::{power_law_fit, ScalingFit};

/// Coefficients of `g_β` against `du²`, `η²` and `g_D` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub u: f64,
    pub beta: f64,
    pub coeff_du2: f64,
    pub coeff_eta2: f64,
    pub coeff_gd: f64,
    /// `−σφ₁'(u)`, the moment-map value in the positive case.
    pub x: f64,
    pub phi: f64,
    pub phi_dd: f64,
}

impl MetricSample {
    /// `√(coeff_du2·coeff_eta2)·coeff_gD^{n−1}`, the volume density against `du ∧ η ∧ vol_D`.
    pub fn volume_density(&self, n: u32) -> f64 {
        (self.coeff_du2 * self.coeff_eta2).sqrt() * self.coeff_gd.powi(n as i32 - 1)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 || beta == 1.0 {
        Ok(())
    } else {
        Err(ConeError::param("beta", format!("must lie in (0, 1], got {beta}")))
    }
}

fn check_u(u: f64) -> Result<()> {
    if u < 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(ConeError::Domain(format!("u must be negative and finite, got {u}")))
    }
}

pub fn metric_at(p: &PotentialProfile, beta: f64, u: f64) -> Result<MetricSample> {
    check_beta(beta)?;
    check_u(u)?;
    let d = p.derivatives(u)?;
    Ok(sample_from(p, beta, u, d.phi, d.d1, d.d2))
}

fn sample_from(p: &PotentialProfile, beta: f64, u: f64, phi: f64, d1: f64, d2: f64) -> MetricSample {
    let x = -p.sigma() * d1;
    MetricSample {
        u,
        beta,
        coeff_du2: 0.5 * d2,
        coeff_eta2: 2.0 * beta * beta * d2,
        coeff_gd: beta * x,
        x,
        phi,
        phi_dd: d2,
    }
}

/// Moment-map value `x = −φ₁'` and angle `s` with `cos s = x^{(n+1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCoords {
    pub x: f64,
    pub s: f64,
}

fn require_positive(p: &PotentialProfile) -> Result<()> {
    if p.sign() == AnsatzSign::Positive {
        Ok(())
    } else {
        Err(ConeError::Domain("moment coordinates exist only for the positive sign".into()))
    }
}

/// Uses `x^{n+1} = 1 − e^{−φ₁}`, so `sin s = e^{−φ₁/2}` and `cos s = √(1 − e^{−φ₁})`.
pub fn to_moment_coords(p: &PotentialProfile, u: f64) -> Result<MomentCoords> {
    require_positive(p)?;
    check_u(u)?;
    let phi = p.eval_phi1(u)?;
    Ok(moment_from_phi(p, phi))
}

pub(crate) fn moment_from_phi(p: &PotentialProfile, phi: f64) -> MomentCoords {
    let one_minus = -(-phi).exp_m1();
    let x = one_minus.powf(1.0 / f64::from(p.n() + 1));
    let s = (-0.5 * phi).exp().atan2(one_minus.sqrt());
    MomentCoords { x, s }
}

/// `φ₁` at the point with angle `s`: `φ₁ = −log sin²s`.
pub(crate) fn phi_of_s(s: f64) -> f64 {
    if s > std::f64::consts::FRAC_PI_4 {
        -(-s.cos().powi(2)).ln_1p()
    } else {
        -2.0 * s.sin().ln()
    }
}

/// Inverse of the moment angle. Since `φ₁(u) = −log sin²s` and `u = −F_+(φ₁)`, the
/// inverse is explicit and needs no iteration.
pub fn from_s(p: &PotentialProfile, s: f64) -> Result<f64> {
    require_positive(p)?;
    if !(s > 0.0 && s < std::f64::consts::FRAC_PI_2) {
        return Err(ConeError::Domain(format!("s must lie in (0, π/2), got {s}")));
    }
    let phi = phi_of_s(s);
    if phi <= 0.0 {
        return Err(ConeError::Domain(format!("s = {s} is numerically indistinguishable from π/2")));
    }
    Ok(-p.eval_f(phi)?)
}

/// Coefficients of `g_β` in the arclength angle `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMetric {
    pub s: f64,
    pub coeff_ds2: f64,
    pub coeff_eta2: f64,
    pub coeff_gd: f64,
}

/// `g_β = (2/(n+1)) ds² + (2/(n+1)) β² sin²s cos^{−2(n−1)/(n+1)}s η² + β cos^{2/(n+1)}s g_D`.
pub fn metric_in_s(p: &PotentialProfile, beta: f64, s: f64) -> Result<SMetric> {
    require_positive(p)?;
    check_beta(beta)?;
    if !(s > 0.0 && s < std::f64::consts::FRAC_PI_2) {
        return Err(ConeError::Domain(format!("s must lie in (0, π/2), got {s}")));
    }
    let np1 = f64::from(p.n() + 1);
    let nm1 = f64::from(p.n()) - 1.0;
    let c = s.cos();
    Ok(SMetric {
        s,
        coeff_ds2: 2.0 / np1,
        coeff_eta2: 2.0 / np1 * beta * beta * s.sin().powi(2) / c.powf(2.0 * nm1 / np1),
        coeff_gd: beta * c.powf(2.0 / np1),
    })
}

/// Pullback of [`metric_at`] through `u(s)`: `du/ds = 1/(ds/du)` with
/// `ds/du = √((n+1)φ₁''/4)` from the identities above.
pub fn metric_in_s_pullback(p: &PotentialProfile, beta: f64, s: f64) -> Result<SMetric> {
    let u = from_s(p, s)?;
    let m = metric_at(p, beta, u)?;
    // x^{n+1} = cos²s ⇒ (n+1) x^n x' = −2 cos s sin s s'; x' = −φ₁''.
    let n = f64::from(p.n());
    let ds_du = (n + 1.0) * m.x.powf(n) * m.phi_dd / (2.0 * s.cos() * s.sin());
    Ok(SMetric { s, coeff_ds2: m.coeff_du2 / (ds_du * ds_du), coeff_eta2: m.coeff_eta2, coeff_gd: m.coeff_gd })
}

/// The four scalars bounding the curvature of the model, computed in two independent ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub u: f64,
    pub beta: f64,
    /// `e^{−σφ₁(u)}`.
    pub big_x: f64,
    /// Closed forms in `big_x`.
    pub q: [f64; 4],
    /// Differentiation of `log φ₁''` and `log(−σφ₁')` along the ODE.
    pub q_ode: [f64; 4],
    pub max_abs_q: f64,
    pub max_discrepancy: f64,
    /// Positive sign only: `1/(1−e^{−φ_β}) + 1/(β(1−e^{−φ_β})^{1/(n+1)})`; `NaN` otherwise.
    pub bound_estimate: f64,
}

/// Agreement demanded between the two computations of each quantity.
pub const CURVATURE_AGREEMENT: f64 = 1e-8;

/// Closed forms of `(log φ'')''/φ''`, `(log(−σφ'))''/φ''`, `(log φ'')'/φ'`, `(log(−σφ'))'/φ'`
/// in terms of `X = e^{−σφ₁}`, written with `D = (n+1)(1 − σX)`:
/// `(σ(n−2)(n+1) + 2X)/D`, `(X − σ(n+1))/D`, `(2X − σ(n+1))/D`, `X/D`.
pub fn curvature_closed_forms(n: u32, sign: AnsatzSign, phi: f64) -> [f64; 4] {
    let np1 = f64::from(n + 1);
    let nf = f64::from(n);
    let s = sign.sigma();
    // Each quantity is (α + γX)/D; for large X divide through by X to stay finite.
    let ratio = |alpha: f64, gamma: f64| -> f64 {
        match sign {
            AnsatzSign::Positive => {
                // α + γX = (α + γ) − γ(1 − X), exact when α + γ vanishes.
                let one_minus = -(-phi).exp_m1();
                (alpha + gamma - gamma * one_minus) / (np1 * one_minus)
            }
            AnsatzSign::Negative => {
                if phi > 0.0 {
                    let y = (-phi).exp();
                    (alpha * y + gamma) / (np1 * (y + 1.0))
                } else {
                    let x = phi.exp();
                    (alpha + gamma * x) / (np1 * (1.0 + x))
                }
            }
        }
    };
    [
        ratio(s * (nf - 2.0) * np1, 2.0),
        ratio(-s * np1, 1.0),
        ratio(-s * np1, 2.0),
        ratio(0.0, 1.0),
    ]
}

/// The four quantities by differentiating the ODE, with the roundoff amplification of each
/// (the cancellation factor of its numerator).
fn curvature_by_ode(p: &PotentialProfile, phi: f64) -> ([f64; 4], [f64; 4]) {
    let j = p.jet_from_phi(phi);
    let [d1, d2, d3, d4] = j.d;
    let cancel = |a: f64, b: f64| (a.abs() + b.abs()) / (a - b).abs();
    (
        [
            (d4 * d2 - d3 * d3) / (d2 * d2 * d2),
            (d3 * d1 - d2 * d2) / (d1 * d1 * d2),
            d3 / (d2 * d1),
            d2 / (d1 * d1),
        ],
        [cancel(d4 * d2, d3 * d3), cancel(d3 * d1, d2 * d2), 1.0, 1.0],
    )
}

pub fn curvature_quantities(p: &PotentialProfile, beta: f64, u: f64) -> Result<CurvatureReport> {
    check_beta(beta)?;
    check_u(u)?;
    let phi = p.eval_phi1(u)?;
    curvature_from_phi(p, beta, u, phi)
}

pub(crate) fn curvature_from_phi(p: &PotentialProfile, beta: f64, u: f64, phi: f64) -> Result<CurvatureReport> {
    let q = curvature_closed_forms(p.n(), p.sign(), phi);
    let (q_ode, amplification) = curvature_by_ode(p, phi);
    // Quantities whose ODE route loses more than half the digits are not compared.
    let mut disc: f64 = 0.0;
    for ((a, b), amp) in q.iter().zip(&q_ode).zip(&amplification) {
        if *amp * f64::EPSILON < 1e-10 {
            disc = disc.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    if !(disc <= CURVATURE_AGREEMENT) {
        return Err(ConeError::NonFinite(format!(
            "curvature quantities disagree by {disc:e} at u = {u} (closed form vs ODE differentiation)"
        )));
    }
    let bound_estimate = match p.sign() {
        AnsatzSign::Positive => {
            let one_minus = -(-phi).exp_m1();
            1.0 / one_minus + 1.0 / (beta * one_minus.powf(1.0 / f64::from(p.n() + 1)))
        }
        AnsatzSign::Negative => f64::NAN,
    };
    Ok(CurvatureReport {
        u,
        beta,
        big_x: (-p.sigma() * phi).exp(),
        q,
        q_ode,
        max_abs_q: q.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        max_discrepancy: disc,
        bound_estimate,
    })
}

/// Zones of the negative-sign model near the cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspZone {
    /// `βt → 0⁻`, compared with the complete hyperbolic-cusp metric.
    BetaTtoZero,
    /// `βt` in a fixed compact range, compared with `β²e^{βt}` and `β`.
    Middle,
    /// `βt → −∞`, compared with `a_n β² e^{βt}` and `β`.
    BetaTtoMinusInfinity,
}

impl CuspZone {
    pub fn contains(self, u: f64) -> bool {
        match self {
            CuspZone::BetaTtoZero => u > -1e-2 && u < 0.0,
            CuspZone::Middle => (-3.0..=-1.0 / 3.0).contains(&u),
            CuspZone::BetaTtoMinusInfinity => u < -10.0,
        }
    }
}

/// Ratios of the `ξξ̄` and `θ_D` coefficients of `ω_β` to those of the zone model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneRatio {
    pub t: f64,
    pub u: f64,
    pub ratio_xi: f64,
    pub ratio_theta: f64,
}

pub fn cusp_zone_comparison(p: &PotentialProfile, beta: f64, zone: CuspZone, t_grid: &[f64]) -> Result<Vec<ZoneRatio>> {
    if p.sign() != AnsatzSign::Negative {
        return Err(ConeError::Domain("cusp zones are defined for the negative sign".into()));
    }
    check_beta(beta)?;
    let np1 = f64::from(p.n() + 1);
    let a_n = p.i_n().exp() / np1;
    t_grid
        .iter()
        .map(|&t| {
            let u = beta * t;
            if !zone.contains(u) {
                return Err(ConeError::Domain(format!("βt = {u} lies outside zone {zone:?}")));
            }
            let d = p.derivatives(u)?;
            let xi = beta * beta * d.d2;
            let theta = beta * d.d1;
            let (mxi, mtheta) = match zone {
                CuspZone::BetaTtoZero => (np1 / (t * t), np1 / (-t)),
                CuspZone::Middle => (beta * beta * u.exp(), beta),
                CuspZone::BetaTtoMinusInfinity => (a_n * beta * beta * u.exp(), beta),
            };
            Ok(ZoneRatio { t, u, ratio_xi: xi / mxi, ratio_theta: theta / mtheta })
        })
        .collect()
}

/// Fit of `|φ₁'(u) + c'_n(−u)^{1/n}|` against `−u` near `0⁻` (positive sign).
pub fn derivative_zero_fit(p: &PotentialProfile, u_grid: &[f64]) -> Result<ScalingFit> {
    require_positive(p)?;
    let nf = f64::from(p.n());
    let cp = (nf / (nf + 1.0)).powf(1.0 / nf);
    let mut xs = Vec::with_capacity(u_grid.len());
    let mut ys = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        check_u(u)?;
        let d = p.derivatives(u)?;
        xs.push(-u);
        ys.push(d.d1 + cp * (-u).powf(1.0 / nf));
    }
    power_law_fit(&xs, &ys, 8)
}

/// Relative defect of the `du² + η²` block against `(2/(n+1))e^{J_n}(dr² + β²r²η²)`,
/// `r = e^{u/2}`, fitted against `r` (positive sign, `u → −∞`).
pub fn divisor_block_fit(p: &PotentialProfile, u_grid: &[f64]) -> Result<ScalingFit> {
    require_positive(p)?;
    let np1 = f64::from(p.n() + 1);
    let lead = p.j_n().exp() / np1;
    let mut xs = Vec::with_capacity(u_grid.len());
    let mut ys = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        check_u(u)?;
        let d = p.derivatives(u)?;
        xs.push((0.5 * u).exp());
        ys.push(d.d2 / (lead * u.exp()) - 1.0);
    }
    power_law_fit(&xs, &ys, 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_density_reduces() {
        for sign in [AnsatzSign::Negative, AnsatzSign::Positive] {
            let p = PotentialProfile::new(3, sign).unwrap();
            let m = metric_at(&p, 0.3, -0.7).unwrap();
            let expect = 0.3_f64.powi(3) * m.phi_dd * m.x.powi(2);
            assert!((m.volume_density(3) - expect).abs() < 1e-14 * expect);
        }
    }

    #[test]
    fn negative_sign_has_no_moment_map() {
        let p = PotentialProfile::new(1, AnsatzSign::Negative).unwrap();
        assert!(to_moment_coords(&p, -1.0).is_err());
        assert!(from_s(&p, 0.5).is_err());
        assert!(metric_in_s(&p, 0.5, 0.5).is_err());
    }

    #[test]
    fn zone_mismatch_is_reported() {
        let p = PotentialProfile::new(1, AnsatzSign::Negative).unwrap();
        assert!(cusp_zone_comparison(&p, 0.1, CuspZone::Middle, &[-100.0]).is_err());
    }
}
