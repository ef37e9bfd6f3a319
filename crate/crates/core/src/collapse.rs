//! Lengths, volumes and the limit measure of the collapsing model, and the table of
//! pointed Gromov–Hausdorff limits of its rescalings.

use serde::{Deserialize, Serialize};

use crate::calabi::{AnsatzSign, PotentialProfile};
use crate::error::{ConeError, Result};
use crate::fit::{power_law_fit, ScalingFit};
use crate::metric::{from_s, metric_at, moment_from_phi};
use crate::quad::{integrate, QuadOptions};

/// Positive-sign profile together with the scalars needed for volumes.
#[derive(Debug, Clone)]
pub struct CollapseProfile {
    pub profile: PotentialProfile,
    pub beta: f64,
    pub vol_d: f64,
}

impl CollapseProfile {
    pub fn new(profile: PotentialProfile, beta: f64, vol_d: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ConeError::param("beta", format!("must lie in (0, 1), got {beta}")));
        }
        if !(vol_d > 0.0 && vol_d.is_finite()) {
            return Err(ConeError::param("vol_d", "must be positive"));
        }
        Ok(CollapseProfile { profile, beta, vol_d })
    }

    fn n(&self) -> u32 {
        self.profile.n()
    }
}

fn length_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 2000 }
}

/// Arclength `∫_{u1}^{u2} √(φ₁''/2) du` of the radial direction; `u1` may be `−∞` and, for
/// the positive sign, `u2` may be `0`.
///
/// The integral is taken in the variable `φ₁`, where the line element becomes
/// `(2(n+1))^{−1/2} e^{−σφ/2}(1 − σe^{−σφ})^{−1/2} dφ`; the square-root endpoint singularity at
/// `φ = 0` (positive sign) is removed by `φ = w²`, and the negative sign uses `y = e^{φ/2}`.
pub fn radial_length(p: &PotentialProfile, u1: f64, u2: f64) -> Result<f64> {
    if !(u1 < u2) || u2 > 0.0 || u1.is_nan() {
        return Err(ConeError::Domain(format!("need u1 < u2 <= 0, got [{u1}, {u2}]")));
    }
    let np1 = f64::from(p.n() + 1);
    let pref = (2.0 * np1).sqrt().recip();
    match p.sign() {
        AnsatzSign::Positive => {
            let phi_hi = if u1 == f64::NEG_INFINITY { f64::INFINITY } else { p.eval_phi1(u1)? };
            let phi_lo = if u2 == 0.0 { 0.0 } else { p.eval_phi1(u2)? };
            let w_lo = phi_lo.sqrt();
            let w_hi = phi_hi.sqrt().min(40.0);
            if w_hi <= w_lo {
                return Ok(0.0);
            }
            let f = |w: f64| {
                if w == 0.0 {
                    2.0
                } else {
                    let w2 = w * w;
                    2.0 * (-0.5 * w2).exp() * w / (-(-w2).exp_m1()).sqrt()
                }
            };
            Ok(pref * integrate(f, w_lo, w_hi, length_opts())?.value)
        }
        AnsatzSign::Negative => {
            if u2 == 0.0 {
                return Err(ConeError::Domain("the negative-sign model has infinite length at u = 0".into()));
            }
            let y_lo = if u1 == f64::NEG_INFINITY { 0.0 } else { (0.5 * p.eval_phi1(u1)?).exp() };
            let y_hi = (0.5 * p.eval_phi1(u2)?).exp();
            let f = |y: f64| 2.0 / (1.0 + y * y).sqrt();
            Ok(pref * integrate(f, y_lo, y_hi, length_opts())?.value)
        }
    }
}

/// Closed form and quadrature of the total volume of the positive-sign model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub beta: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_diff: f64,
}

/// Integrates the frame volume density of [`metric_at`] over `u ∈ (−∞, u_max)` via
/// `y = e^{u/2}`.
fn density_integral(cp: &CollapseProfile, u_max: f64) -> Result<f64> {
    let y_max = (0.5 * u_max).exp();
    let n = cp.n();
    let mut failure = None;
    let f = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let u = 2.0 * y.ln();
        match metric_at(&cp.profile, cp.beta, u) {
            Ok(m) => m.volume_density(n) * 2.0 / y,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let r = integrate(f, 0.0, y_max, QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_panels: 4000 });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r?.value)
}

pub fn model_volume(cp: &CollapseProfile) -> Result<VolumeReport> {
    if cp.profile.sign() != AnsatzSign::Positive {
        return Err(ConeError::Domain("the negative-sign model has infinite volume".into()));
    }
    let n = cp.n();
    let circle = 2.0 * std::f64::consts::PI;
    let closed = cp.beta.powi(n as i32) * circle * cp.vol_d / f64::from(n);
    let quad = circle * cp.vol_d * density_integral(cp, 0.0)?;
    Ok(VolumeReport { beta: cp.beta, closed_form: closed, quadrature: quad, rel_diff: (quad - closed).abs() / closed })
}

/// One row of the pushed-forward normalized volume measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub s: f64,
    pub cdf: f64,
    pub cdf_limit: f64,
    pub density: f64,
    pub density_limit: f64,
}

/// Pushes the normalized volume of `g_β` to the angle `s` and compares with
/// `1 − cos^{2n/(n+1)} s`.
pub fn limit_measure_pushforward(cp: &CollapseProfile, s_grid: &[f64]) -> Result<Vec<MeasureRow>> {
    if cp.profile.sign() != AnsatzSign::Positive {
        return Err(ConeError::Domain("the limit measure is defined for the positive sign".into()));
    }
    let nf = f64::from(cp.n());
    let np1 = nf + 1.0;
    let total = density_integral(cp, 0.0)?;
    let e = 2.0 * nf / np1;
    s_grid
        .iter()
        .map(|&s| {
            let cdf_limit = 1.0 - s.cos().powf(e);
            let density_limit = e * s.cos().powf(e - 1.0) * s.sin();
            if s <= 0.0 {
                return Ok(MeasureRow { s, cdf: 0.0, cdf_limit, density: 0.0, density_limit });
            }
            if s >= std::f64::consts::FRAC_PI_2 {
                return Ok(MeasureRow { s, cdf: 1.0, cdf_limit, density: 0.0, density_limit });
            }
            let u = from_s(&cp.profile, s)?;
            let cdf = density_integral(cp, u)? / total;
            let m = metric_at(&cp.profile, cp.beta, u)?;
            let ds_du = np1 * m.x.powf(nf) * m.phi_dd / (2.0 * s.cos() * s.sin());
            let density = m.volume_density(cp.n()) / ds_du / total;
            Ok(MeasureRow { s, cdf, cdf_limit, density, density_limit })
        })
        .collect()
}

/// Location of the base point of a rescaled limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    OnDivisor,
    OffDivisor,
}

/// Position of the rescaling `ε_β` relative to `1`, `β` and `β^{1+1/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScaleRate {
    /// `ε_β = 1`.
    Unit,
    /// `β ≪ ε_β ≪ 1`.
    AboveBeta,
    /// `ε_β = β`.
    Beta,
    /// `β^{1+1/n} ≪ ε_β ≪ β`.
    BetweenTianYauAndBeta,
    /// `ε_β = β^{1+1/n}`.
    TianYau,
    /// `ε_β ≪ β^{1+1/n}`.
    BelowTianYau,
}

impl ScaleRate {
    pub const ALL: [ScaleRate; 6] = [
        ScaleRate::Unit,
        ScaleRate::AboveBeta,
        ScaleRate::Beta,
        ScaleRate::BetweenTianYauAndBeta,
        ScaleRate::TianYau,
        ScaleRate::BelowTianYau,
    ];

    /// Rate class of `ε_β = β^e`.
    pub fn from_exponent(e: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(ConeError::param("n", "dimension must be at least 1"));
        }
        let ty = 1.0 + 1.0 / f64::from(n);
        if !e.is_finite() || e < 0.0 {
            return Err(ConeError::param("rate", format!("unknown rate class for exponent {e}")));
        }
        Ok(if e == 0.0 {
            ScaleRate::Unit
        } else if e < 1.0 {
            ScaleRate::AboveBeta
        } else if e == 1.0 {
            ScaleRate::Beta
        } else if e < ty {
            ScaleRate::BetweenTianYauAndBeta
        } else if e == ty {
            ScaleRate::TianYau
        } else {
            ScaleRate::BelowTianYau
        })
    }
}

/// Pointed limit space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitSpace {
    Interval,
    HalfLine,
    HalfLineTimesD,
    HalfLineTimesCn1,
    TianYau,
    TrivialBubble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhRegime {
    pub point: PointClass,
    pub rate: ScaleRate,
    pub limit: LimitSpace,
}

pub fn classify_regime(point: PointClass, rate: ScaleRate) -> GhRegime {
    use LimitSpace::*;
    use ScaleRate::*;
    let limit = match (point, rate) {
        (_, Unit) => Interval,
        (PointClass::OnDivisor, AboveBeta) => HalfLine,
        (PointClass::OnDivisor, Beta) => HalfLineTimesD,
        (PointClass::OnDivisor, BetweenTianYauAndBeta | ScaleRate::TianYau | BelowTianYau) => HalfLineTimesCn1,
        (PointClass::OffDivisor, AboveBeta | Beta | BetweenTianYauAndBeta) => HalfLine,
        (PointClass::OffDivisor, ScaleRate::TianYau) => LimitSpace::TianYau,
        (PointClass::OffDivisor, BelowTianYau) => TrivialBubble,
    };
    GhRegime { point, rate, limit }
}

/// One smallness witness evaluated over a sweep of `β`, with the fitted rate in `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: ScalingFit,
}

/// Evaluates the quantities whose vanishing as `β → 0` certifies the limit of
/// `(X, ε_β^{-1} g_β, p)` with `ε_β = β^{exponent}`.
///
/// Each witness is a metric coefficient of the rescaled model read off at the edge of a
/// unit ball around the base point (or a deviation from its limiting value); a positive
/// fitted rate means it tends to zero.
pub fn regime_witness(
    p: &PotentialProfile,
    point: PointClass,
    exponent: f64,
    betas: &[f64],
    mu: f64,
) -> Result<Vec<Witness>> {
    if p.sign() != AnsatzSign::Positive {
        return Err(ConeError::Domain("rescaled limits are computed for the positive sign".into()));
    }
    if betas.len() < 3 {
        return Err(ConeError::TooFewPoints { needed: 3, got: betas.len() });
    }
    let n = p.n();
    let nf = f64::from(n);
    let rate = ScaleRate::from_exponent(exponent, n)?;
    let regime = classify_regime(point, rate);
    let mut names: Vec<&'static str> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for &beta in betas {
        let eps = beta.powf(exponent);
        let mut w = Vec::new();
        let at_s = |s: f64| -> Result<crate::metric::MetricSample> { metric_at(p, beta, from_s(p, s)?) };
        match (point, regime.limit) {
            (_, LimitSpace::Interval) => {
                let m = at_s(std::f64::consts::FRAC_PI_4)?;
                names = vec!["g_d_coefficient", "circle_coefficient"];
                w.push(m.coeff_gd);
                w.push(m.coeff_eta2);
            }
            (PointClass::OnDivisor, limit) => {
                let m = at_s(eps.sqrt().min(0.5))?;
                names = vec!["circle_over_eps", "divisor_witness"];
                w.push(m.coeff_eta2 / eps);
                let gd = m.coeff_gd / eps;
                w.push(match limit {
                    LimitSpace::HalfLine => gd,
                    LimitSpace::HalfLineTimesD => (gd - 1.0).abs(),
                    _ => 1.0 / gd,
                });
            }
            (PointClass::OffDivisor, LimitSpace::HalfLine) => {
                let s_edge = std::f64::consts::FRAC_PI_2 - eps.sqrt().min(0.5);
                let m_edge = at_s(s_edge)?;
                let m_ty = metric_at(p, beta, -beta)?;
                names = vec!["g_d_over_eps", "circle_over_eps"];
                w.push(m_edge.coeff_gd / eps);
                w.push(m_ty.coeff_eta2 / eps);
            }
            (PointClass::OffDivisor, limit) => {
                let zone = radial_length(p, -0.5 * beta.powf(mu), 0.0)?;
                names = vec!["inverse_tian_yau_zone_size", "ty_scale_ratio"];
                w.push(eps.sqrt() / zone);
                let ratio = eps / beta.powf(1.0 + 1.0 / nf);
                w.push(match limit {
                    LimitSpace::TianYau => (ratio - 1.0).abs().max(f64::MIN_POSITIVE),
                    _ => ratio,
                });
            }
        }
        rows.push(w);
    }
    names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let values: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let fit = power_law_fit(betas, &values, 3)?;
            Ok(Witness { name: (*name).to_string(), betas: betas.to_vec(), values, fit })
        })
        .collect()
}

/// Moment angle of a point, used by the command layer for tables in `s`.
pub fn angle_of(p: &PotentialProfile, u: f64) -> Result<f64> {
    Ok(moment_from_phi(p, p.eval_phi1(u)?).s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_total_and_matches_table() {
        for point in [PointClass::OnDivisor, PointClass::OffDivisor] {
            for rate in ScaleRate::ALL {
                let _ = classify_regime(point, rate);
            }
        }
        assert_eq!(classify_regime(PointClass::OffDivisor, ScaleRate::TianYau).limit, LimitSpace::TianYau);
        assert_eq!(classify_regime(PointClass::OnDivisor, ScaleRate::Beta).limit, LimitSpace::HalfLineTimesD);
        assert_eq!(classify_regime(PointClass::OnDivisor, ScaleRate::AboveBeta).limit, LimitSpace::HalfLine);
        assert_eq!(classify_regime(PointClass::OffDivisor, ScaleRate::BelowTianYau).limit, LimitSpace::TrivialBubble);
        assert_eq!(classify_regime(PointClass::OnDivisor, ScaleRate::BelowTianYau).limit, LimitSpace::HalfLineTimesCn1);
    }

    #[test]
    fn rate_from_exponent() {
        assert_eq!(ScaleRate::from_exponent(1.5, 2).unwrap(), ScaleRate::TianYau);
        assert_eq!(ScaleRate::from_exponent(1.2, 2).unwrap(), ScaleRate::BetweenTianYauAndBeta);
        assert_eq!(ScaleRate::from_exponent(0.5, 2).unwrap(), ScaleRate::AboveBeta);
        assert!(ScaleRate::from_exponent(-1.0, 2).is_err());
        assert!(ScaleRate::from_exponent(f64::NAN, 2).is_err());
    }

    #[test]
    fn reversed_interval_rejected() {
        let p = PotentialProfile::new(1, AnsatzSign::Positive).unwrap();
        assert!(radial_length(&p, -1.0, -2.0).is_err());
    }
}
