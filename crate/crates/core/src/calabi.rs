//! The Calabi-ansatz potential `φ₁` solving `(−σφ')^{n+1} = 1 − σe^{−σφ}` on `(−∞, 0)`,
//! its rescaled families, derivatives and asymptotic constants.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ConeError, Result};
use crate::fit::{exponential_fit, power_law_fit, ScalingFit};
use crate::interp::Pchip;
use crate::quad::{integrate, QuadOptions};

/// Sign of the curvature of the line bundle: `Negative` is σ = −1, `Positive` is σ = +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzSign {
    Negative,
    Positive,
}

impl AnsatzSign {
    pub fn sigma(self) -> f64 {
        match self {
            AnsatzSign::Negative => -1.0,
            AnsatzSign::Positive => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AnsatzSign::Negative => "neg",
            AnsatzSign::Positive => "pos",
        }
    }
}

impl std::str::FromStr for AnsatzSign {
    type Err = ConeError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg" | "negative" | "-1" => Ok(AnsatzSign::Negative),
            "pos" | "positive" | "+1" | "1" => Ok(AnsatzSign::Positive),
            other => Err(ConeError::param("sigma", format!("expected pos or neg, got `{other}`"))),
        }
    }
}

/// Named constants attached to dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub n: u32,
    pub i_n: f64,
    pub j_n: f64,
    pub c_n: f64,
    pub c_prime_n: f64,
    pub a_n: f64,
    pub i_n_error: f64,
    pub j_n_error: f64,
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(ConeError::param("n", "dimension must be at least 1"))
    } else {
        Ok(())
    }
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: tol, max_panels: 2000 }
}

/// `G(z0) = ∫_0^{z0} (1 − (1+z)^{−a}) / z dz`.
fn g_neg(a: f64, z0: f64, tol: f64) -> Result<(f64, f64)> {
    let f = |z: f64| {
        if z == 0.0 {
            a
        } else {
            -(-a * z.ln_1p()).exp_m1() / z
        }
    };
    let r = integrate(f, 0.0, z0, quad_opts(tol))?;
    Ok((r.value, r.error))
}

/// `H(z0) = ∫_0^{z0} ((1−z)^{−a} − 1) / z dz`, for `z0 ≤ 1/2`.
fn h_pos(a: f64, z0: f64, tol: f64) -> Result<(f64, f64)> {
    let f = |z: f64| {
        if z == 0.0 {
            a
        } else {
            (-a * (-z).ln_1p()).exp_m1() / z
        }
    };
    let r = integrate(f, 0.0, z0, quad_opts(tol))?;
    Ok((r.value, r.error))
}

/// `m ∫_0^{w} dv / (1 − v^m)` with `m = (n+1)/n`, smooth for `w < 1`.
fn pos_small(m: f64, w: f64, tol: f64) -> Result<(f64, f64)> {
    let r = integrate(|v: f64| m / (1.0 - v.powf(m)), 0.0, w, quad_opts(tol))?;
    Ok((r.value, r.error))
}

/// `(n+1) ∫_0^{w} (1 + v^{n+1})^{−a} dv`.
fn neg_large(n: u32, w: f64, tol: f64) -> Result<(f64, f64)> {
    let np1 = f64::from(n + 1);
    let a = 1.0 / np1;
    let r = integrate(|v: f64| np1 * (1.0 + v.powf(np1)).powf(-a), 0.0, w, quad_opts(tol))?;
    Ok((r.value, r.error))
}

fn i_n_with_error(n: u32, tol: f64) -> Result<(f64, f64)> {
    let a = 1.0 / f64::from(n + 1);
    let (p, pe) = neg_large(n, 1.0, tol)?;
    let (g, ge) = g_neg(a, 1.0, tol)?;
    Ok((p - g, pe + ge))
}

fn j_n_with_error(n: u32, tol: f64) -> Result<(f64, f64)> {
    let np1 = f64::from(n + 1);
    let a = 1.0 / np1;
    let m = np1 / f64::from(n);
    let (h, he) = h_pos(a, 0.5, tol)?;
    let (p, pe) = pos_small(m, 0.5_f64.powf(1.0 / m), tol)?;
    Ok((h + p - std::f64::consts::LN_2, he + pe))
}

/// Computes `I_n`, `J_n` by quadrature and the algebraic constants in closed form.
pub fn constants(n: u32) -> Result<ConstantsReport> {
    check_n(n)?;
    let tol = 1e-14;
    let (i_n, i_err) = i_n_with_error(n, tol)?;
    let (j_n, j_err) = j_n_with_error(n, tol)?;
    let nf = f64::from(n);
    let ratio = nf / (nf + 1.0);
    Ok(ConstantsReport {
        n,
        i_n,
        j_n,
        c_n: ratio.powf((nf + 1.0) / nf),
        c_prime_n: ratio.powf(1.0 / nf),
        a_n: i_n.exp() / (nf + 1.0),
        i_n_error: i_err,
        j_n_error: j_err,
    })
}

/// `φ₁` and its first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    pub t: f64,
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `φ` through `φ''''`, all obtained from the ODE without numerical differentiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub phi: f64,
    pub d: [f64; 4],
}

/// Asymptotic regime for [`PotentialProfile::expansion_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionRegime {
    MinusInfinity,
    ZeroMinus,
}

#[derive(Debug)]
struct InverseTable {
    /// `log(−t)` at the nodes, increasing.
    key: Vec<f64>,
    /// `φ₁` at the nodes.
    phi: Vec<f64>,
    spline: Pchip,
}

/// Tabulated, invertible `φ₁` for a sign and dimension.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    n: u32,
    sign: AnsatzSign,
    tol: f64,
    i_n: f64,
    j_n: f64,
    table: Arc<InverseTable>,
}

const TABLE_NODES: usize = 512;
const POS_SPLIT: f64 = 1.0;

impl PotentialProfile {
    pub fn new(n: u32, sign: AnsatzSign) -> Result<Self> {
        Self::with_tolerance(n, sign, 1e-13)
    }

    pub fn with_tolerance(n: u32, sign: AnsatzSign, tol: f64) -> Result<Self> {
        check_n(n)?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConeError::param("tolerance", "must be positive and finite"));
        }
        let (i_n, _) = i_n_with_error(n, tol.min(1e-14))?;
        let (j_n, _) = j_n_with_error(n, tol.min(1e-14))?;
        let mut profile = PotentialProfile {
            n,
            sign,
            tol,
            i_n,
            j_n,
            table: Arc::new(InverseTable { key: vec![], phi: vec![], spline: Pchip::empty() }),
        };
        profile.table = Arc::new(profile.build_table()?);
        Ok(profile)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sign(&self) -> AnsatzSign {
        self.sign
    }

    pub fn sigma(&self) -> f64 {
        self.sign.sigma()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn i_n(&self) -> f64 {
        self.i_n
    }

    pub fn j_n(&self) -> f64 {
        self.j_n
    }

    fn np1(&self) -> f64 {
        f64::from(self.n + 1)
    }

    fn build_table(&self) -> Result<InverseTable> {
        // Nodes roughly log-spaced in −t over [1e−10, 1e3].
        let mut xs: Vec<f64> = (0..TABLE_NODES)
            .map(|k| {
                let lt = -10.0 + 13.0 * k as f64 / (TABLE_NODES - 1) as f64;
                self.asymptotic_guess(-(10f64.powf(lt)))
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut pairs = Vec::with_capacity(xs.len());
        for &x in &xs {
            let tau = self.eval_f(x)?;
            let t = match self.sign {
                AnsatzSign::Negative => tau,
                AnsatzSign::Positive => -tau,
            };
            if t < 0.0 {
                pairs.push(((-t).ln(), x));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let key: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let phi: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let spline = Pchip::new(key.clone(), phi.clone())?;
        Ok(InverseTable { key, phi, spline })
    }

    fn asymptotic_guess(&self, t: f64) -> f64 {
        let np1 = self.np1();
        match self.sign {
            AnsatzSign::Negative => {
                if t < -1.0 {
                    t + self.i_n
                } else {
                    -np1 * (-t / np1).ln()
                }
            }
            AnsatzSign::Positive => {
                if t < -1.5 {
                    -t - self.j_n
                } else {
                    let nf = f64::from(self.n);
                    (nf / np1).powf(np1 / nf) * (-t).powf(np1 / nf)
                }
            }
        }
    }

    /// `F_-(x)` for the negative sign, `F_+(x)` for the positive sign.
    pub fn eval_f(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(ConeError::Domain(format!("F requires finite x, got {x}")));
        }
        let np1 = self.np1();
        let a = 1.0 / np1;
        match self.sign {
            AnsatzSign::Negative => {
                if x >= 0.0 {
                    let (v, _) = neg_large(self.n, (-x / np1).exp(), self.tol)?;
                    Ok(-v)
                } else {
                    let (g, _) = g_neg(a, x.exp(), self.tol)?;
                    Ok(x - self.i_n - g)
                }
            }
            AnsatzSign::Positive => {
                if x < 0.0 {
                    return Err(ConeError::Domain(format!("F_+ requires x >= 0, got {x}")));
                }
                if x == 0.0 {
                    return Ok(0.0);
                }
                if x <= POS_SPLIT {
                    let m = np1 / f64::from(self.n);
                    let w = (-(-x).exp_m1()).powf(1.0 / m);
                    let (v, _) = pos_small(m, w, self.tol)?;
                    Ok(v)
                } else {
                    let (h, _) = h_pos(a, (-x).exp(), self.tol)?;
                    Ok(x + self.j_n - h)
                }
            }
        }
    }

    /// `F'_σ(x)`, the integrand of `F_σ`.
    pub fn eval_f_prime(&self, x: f64) -> f64 {
        let a = 1.0 / self.np1();
        match self.sign {
            AnsatzSign::Negative => {
                if x > 0.0 {
                    (-a * (x + (-x).exp().ln_1p())).exp()
                } else {
                    (-a * x.exp().ln_1p()).exp()
                }
            }
            AnsatzSign::Positive => (-(-x).exp_m1()).powf(-a),
        }
    }

    /// `φ₁(t)` for `t < 0`.
    pub fn eval_phi1(&self, t: f64) -> Result<f64> {
        if !(t < 0.0) || !t.is_finite() {
            return Err(ConeError::Domain(format!("φ₁ is defined for t < 0, got {t}")));
        }
        // Solve F(x) = target with F increasing.
        let target = match self.sign {
            AnsatzSign::Negative => t,
            AnsatzSign::Positive => -t,
        };
        let key = (-t).ln();
        let tab = &self.table;
        let (mut lo, mut hi, guess) = if key > tab.key[0] && key < tab.key[tab.key.len() - 1] {
            let i = tab.key.partition_point(|&k| k < key) - 1;
            let (x0, x1) = (tab.phi[i], tab.phi[i + 1]);
            (x0.min(x1), x0.max(x1), tab.spline.eval(key))
        } else {
            let g = self.asymptotic_guess(t);
            let (lo, hi) = self.expand_bracket(g, target)?;
            (lo, hi, g.clamp(lo, hi))
        };
        let mut x = guess.clamp(lo, hi);
        for _ in 0..100 {
            let r = self.eval_f(x)? - target;
            if r.abs() <= self.tol * target.abs().max(1e-300) || r == 0.0 {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = r / self.eval_f_prime(x);
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Ok(next);
            }
            x = next;
        }
        Err(ConeError::RootFinding(format!("inversion of F at t = {t} did not converge")))
    }

    fn expand_bracket(&self, guess: f64, target: f64) -> Result<(f64, f64)> {
        let floor = match self.sign {
            AnsatzSign::Positive => 0.0,
            AnsatzSign::Negative => f64::NEG_INFINITY,
        };
        let mut width = 1.0_f64.max(0.1 * guess.abs());
        let mut lo = (guess - width).max(floor);
        let mut hi = guess + width;
        for _ in 0..200 {
            let flo = if lo == floor && floor == 0.0 { 0.0 } else { self.eval_f(lo)? };
            let fhi = self.eval_f(hi)?;
            if flo <= target && target <= fhi {
                return Ok((lo, hi));
            }
            width *= 2.0;
            if flo > target {
                lo = (lo - width).max(floor);
            }
            if fhi < target {
                hi += width;
            }
        }
        Err(ConeError::RootFinding(format!("no bracket for F(x) = {target}")))
    }

    /// `−σφ₁'`, which is positive, as a function of `φ₁`.
    fn p_of_phi(&self, phi: f64) -> f64 {
        let a = 1.0 / self.np1();
        match self.sign {
            // (1 + e^φ)^a
            AnsatzSign::Negative => {
                if phi > 0.0 {
                    (a * (phi + (-phi).exp().ln_1p())).exp()
                } else {
                    (a * phi.exp().ln_1p()).exp()
                }
            }
            AnsatzSign::Positive => (-(-phi).exp_m1()).powf(a),
        }
    }

    /// `φ₁''` from `(−σφ')^{n−1}φ'' = e^{−σφ}/(n+1)`, evaluated in log form.
    fn d2_of(&self, phi: f64, p: f64) -> f64 {
        let nf = f64::from(self.n);
        (-self.sigma() * phi - self.np1().ln() - (nf - 1.0) * p.ln()).exp()
    }

    /// Derivatives given `φ₁(t)`.
    pub fn derivatives_from_phi(&self, t: f64, phi: f64) -> Derivatives {
        let p = self.p_of_phi(phi);
        Derivatives { t, phi, d1: -self.sigma() * p, d2: self.d2_of(phi, p) }
    }

    /// `(φ₁, φ₁', φ₁'')` at `t < 0`.
    pub fn derivatives(&self, t: f64) -> Result<Derivatives> {
        let phi = self.eval_phi1(t)?;
        Ok(self.derivatives_from_phi(t, phi))
    }

    /// `φ₁` through its fourth derivative, by differentiating `log φ₁''` along the ODE.
    pub fn jet_from_phi(&self, phi: f64) -> Jet {
        let s = self.sigma();
        let nm1 = f64::from(self.n) - 1.0;
        let p = self.p_of_phi(phi);
        let d1 = -s * p;
        let d2 = self.d2_of(phi, p);
        let l1 = p + s * nm1 * d2 / p;
        let d3 = d2 * l1;
        let l2 = -s * d2 + s * nm1 * (d3 / p + s * d2 * d2 / (p * p));
        let d4 = d2 * (l2 + l1 * l1);
        Jet { phi, d: [d1, d2, d3, d4] }
    }

    pub fn jet(&self, t: f64) -> Result<Jet> {
        Ok(self.jet_from_phi(self.eval_phi1(t)?))
    }

    /// Remainders of the stated expansion on `t_grid`, returned as `(abscissa, remainder)`.
    ///
    /// The abscissa is `t` for exponential regimes and `−t` (or `−t/(n+1)` for the
    /// negative sign at `0⁻`) for power regimes.
    pub fn expansion_remainders(&self, regime: ExpansionRegime, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        let np1 = self.np1();
        let nf = f64::from(self.n);
        t_grid
            .iter()
            .map(|&t| {
                let phi = self.eval_phi1(t)?;
                Ok(match (self.sign, regime) {
                    (AnsatzSign::Negative, ExpansionRegime::MinusInfinity) => {
                        let lead = t + self.i_n + self.i_n.exp() / np1 * t.exp();
                        (t, phi - lead)
                    }
                    (AnsatzSign::Positive, ExpansionRegime::MinusInfinity) => {
                        let lead = -t - self.j_n + self.j_n.exp() / np1 * t.exp();
                        (t, phi - lead)
                    }
                    (AnsatzSign::Positive, ExpansionRegime::ZeroMinus) => {
                        let c_n = (nf / np1).powf(np1 / nf);
                        let lead = c_n * (-t).powf(1.0 + 1.0 / nf);
                        (-t, phi / lead - 1.0)
                    }
                    (AnsatzSign::Negative, ExpansionRegime::ZeroMinus) => {
                        let s = -t / np1;
                        let lead = -np1 * s.ln() - s.powf(np1) / (nf + 2.0);
                        (s, phi - lead)
                    }
                })
            })
            .collect()
    }

    /// Fitted decay exponent of the expansion remainder (at least 8 grid points).
    ///
    /// `MinusInfinity` regresses `log|rem|` on `t`; `ZeroMinus` regresses on `log(−t)`
    /// (positive sign, relative remainder) or `log(−t/(n+1))` (negative sign).
    pub fn expansion_residual(&self, regime: ExpansionRegime, t_grid: &[f64]) -> Result<ScalingFit> {
        self.check_regime(regime, t_grid)?;
        let pairs = self.expansion_remainders(regime, t_grid)?;
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        match regime {
            ExpansionRegime::MinusInfinity => exponential_fit(&xs, &ys, 8),
            ExpansionRegime::ZeroMinus => power_law_fit(&xs, &ys, 8),
        }
    }

    fn check_regime(&self, regime: ExpansionRegime, t_grid: &[f64]) -> Result<()> {
        if t_grid.len() < 8 {
            return Err(ConeError::TooFewPoints { needed: 8, got: t_grid.len() });
        }
        let ok = match regime {
            ExpansionRegime::MinusInfinity => t_grid.iter().all(|&t| t <= -1.0),
            ExpansionRegime::ZeroMinus => t_grid.iter().all(|&t| t < 0.0 && t >= -1.0),
        };
        if ok {
            Ok(())
        } else {
            Err(ConeError::Domain(format!("t-grid is not inside the {regime:?} regime")))
        }
    }

    /// Least-squares estimate of the coefficient `c` in
    /// `φ₁ = −(n+1)log s + c s^{n+1} + O(s^{2(n+1)})`, `s = −t/(n+1)`, negative sign.
    pub fn negative_zero_coefficient(&self, s_grid: &[f64]) -> Result<f64> {
        if self.sign != AnsatzSign::Negative {
            return Err(ConeError::Domain("coefficient is defined for the negative sign".into()));
        }
        let np1 = self.np1();
        let mut num = 0.0;
        let mut den = 0.0;
        for &s in s_grid {
            let phi = self.eval_phi1(-np1 * s)?;
            let y = phi + np1 * s.ln();
            let basis = s.powf(np1);
            num += y * basis;
            den += basis * basis;
        }
        Ok(num / den)
    }
}

/// `φ_β` together with its `t`-derivatives.
#[derive(Debug, Clone)]
pub struct ScaledPotential {
    pub base: PotentialProfile,
    pub beta: f64,
}

impl ScaledPotential {
    pub fn new(base: PotentialProfile, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(ConeError::param("beta", format!("must lie in (0, 1], got {beta}")));
        }
        Ok(ScaledPotential { base, beta })
    }

    fn shift(&self) -> f64 {
        match self.base.sign {
            AnsatzSign::Negative => self.base.np1() * self.beta.ln(),
            AnsatzSign::Positive => 0.0,
        }
    }

    /// `φ_β(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.base.eval_phi1(self.beta * t)? + self.shift())
    }

    /// `(φ_β, φ_β', φ_β'')` in the `t` variable.
    pub fn derivatives(&self, t: f64) -> Result<Derivatives> {
        let d = self.base.derivatives(self.beta * t)?;
        let b = self.beta;
        Ok(Derivatives { t, phi: d.phi + self.shift(), d1: b * d.d1, d2: b * b * d.d2 })
    }
}

/// Convenience wrapper for [`ScaledPotential::eval`].
pub fn eval_scaled(sp: &ScaledPotential, t: f64) -> Result<f64> {
    sp.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_one_constants_match_closed_forms() {
        let c = constants(1).unwrap();
        assert!((c.c_n - 0.25).abs() < 1e-15);
        assert!((c.c_prime_n - 0.5).abs() < 1e-15);
        let h: f64 = 1e-4;
        let mut first = 0.0;
        let mut u: f64 = h / 2.0;
        while u < 60.0 {
            first += h / (u.exp() + 1.0).sqrt();
            u += h;
        }
        let mut second = 0.0;
        let mut u: f64 = -60.0 + h / 2.0;
        while u < 0.0 {
            let s = (u.exp() + 1.0).sqrt();
            second += h * (s - 1.0) / s;
            u += h;
        }
        assert!((c.i_n - (first - second)).abs() < 1e-7, "{} vs {}", c.i_n, first - second);
    }

    #[test]
    fn f_is_continuous_across_representations() {
        for n in 1..=3 {
            let p = PotentialProfile::new(n, AnsatzSign::Positive).unwrap();
            let below = p.eval_f(POS_SPLIT * (1.0 - 1e-12)).unwrap();
            let above = p.eval_f(POS_SPLIT * (1.0 + 1e-12)).unwrap();
            assert!((below - above).abs() < 1e-11);
            let q = PotentialProfile::new(n, AnsatzSign::Negative).unwrap();
            let below = q.eval_f(-1e-13).unwrap();
            let above = q.eval_f(1e-13).unwrap();
            assert!((below - above).abs() < 1e-11);
        }
    }

    #[test]
    fn negative_t_rejected() {
        let p = PotentialProfile::new(1, AnsatzSign::Positive).unwrap();
        assert!(p.eval_phi1(0.0).is_err());
        assert!(p.eval_phi1(1.0).is_err());
        assert!(p.eval_f(-1.0).is_err());
    }
}
