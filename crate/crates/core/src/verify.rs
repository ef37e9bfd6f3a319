//! The twelve acceptance checks and the registry of named suites that group them.
//!
//! Every check returns its raw measurements next to the limit it is judged against, so
//! callers can re-judge with their own tolerances.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::{AnsatzSign, ExpansionRegime, PotentialProfile, ScaledPotential};
use crate::collapse::{limit_measure_pushforward, model_volume, radial_length, CollapseProfile};
use crate::cone::{
    green_representation, laplacian_apply, poisson_solve_modes, ConeDisk, GreenOptions, ModeSolveOptions, PolarField, PolarGrid,
};
use crate::error::{ConeError, Result};
use crate::fit::power_law_fit;
use crate::glue::{
    calabi_field, glued_field, kernel_solutions, mode_decay_check, newton_solve_radial, residual_scaling_scan, GlueConfig, GlueModel,
    NewtonOptions,
};
use crate::linalg::fd_weights;
use crate::metric::{curvature_quantities, cusp_zone_comparison, derivative_zero_fit, CuspZone};
use crate::schauder::{
    corpus, divisor_gradient_constant, gradient_bound_probe, interior_gradient_constant, schauder_probe, solve_closed_form, BoundaryTerm,
    CorpusSpec, SamplingBudget,
};

/// How a measured value is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Check {
    AtMost(f64),
    AtLeast(f64),
    Within { target: f64, tol: f64 },
    /// Passes for any finite value.
    Finite,
    /// Recorded without a pass/fail judgement.
    Info,
}

impl Check {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Check::AtMost(x) => v <= x,
            Check::AtLeast(x) => v >= x,
            Check::Within { target, tol } => (v - target).abs() <= tol,
            Check::Finite => v.is_finite(),
            Check::Info => true,
        }
    }

    /// Distance to the limit, positive when the check holds.
    pub fn margin(&self, v: f64) -> f64 {
        match *self {
            Check::AtMost(x) => x - v,
            Check::AtLeast(x) => v - x,
            Check::Within { target, tol } => tol - (v - target).abs(),
            Check::Finite | Check::Info => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub key: String,
    pub value: f64,
    pub check: Check,
}

impl Measurement {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.check.holds(self.value) || self.check == Check::Info
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub measurements: Vec<Measurement>,
    pub elapsed_s: f64,
    pub runtime_limit_s: f64,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.measurements.iter().all(Measurement::passed) && self.elapsed_s <= self.runtime_limit_s
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.key == key).map(|m| m.value)
    }

    pub fn failing(&self) -> Vec<&Measurement> {
        self.measurements.iter().filter(|m| !m.passed()).collect()
    }
}

struct Recorder(Vec<Measurement>);

impl Recorder {
    fn push(&mut self, key: impl Into<String>, value: f64, check: Check) {
        self.0.push(Measurement { key: key.into(), value, check });
    }
}

/// A named group of criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub criteria: Vec<u8>,
}

pub const CRITERIA: [(u8, &str, f64); 12] = [
    (1, "ode_first_integral", 5.0),
    (2, "expansion_exponents", 30.0),
    (3, "tian_yau_rescaling", 10.0),
    (4, "curvature_bounds", 10.0),
    (5, "cusp_zones", 20.0),
    (6, "collapse_data", 30.0),
    (7, "gluing_scalings", 60.0),
    (8, "radial_newton", 60.0),
    (9, "kernel_limit_odes", 10.0),
    (10, "mode_decay", 60.0),
    (11, "cone_poisson", 120.0),
    (12, "schauder_uniformity", 600.0),
];

pub fn suites() -> Vec<Suite> {
    let s = |name, description, criteria: &[u8]| Suite { name, description, criteria: criteria.to_vec() };
    vec![
        s("ode", "first integral of the radial ODE", &[1]),
        s("expansions", "asymptotic expansions and the Tian–Yau rescaling", &[2, 3]),
        s("curvature", "curvature quantities of the model metric", &[4]),
        s("zones", "cusp-zone quasi-isometry ratios", &[5]),
        s("collapse", "interval length, limit measure and volume", &[6]),
        s("gluing", "glue-zone scalings of the potential and residual", &[7]),
        s("newton", "radial Newton solve from the glued potential", &[8]),
        s("kernel", "radial solutions of the limit operator", &[9]),
        s("modes", "decay of the collapsing circle modes", &[10]),
        s("poisson", "cone Poisson solvers and their identities", &[11]),
        s("schauder", "uniformity of the Schauder constant in β", &[12]),
        s("quick", "all criteria that finish within seconds", &[1, 2, 3, 4, 5, 6, 7, 9]),
        s("all", "every criterion", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]),
    ]
}

pub fn find_suite(name: &str) -> Result<Suite> {
    suites().into_iter().find(|s| s.name == name).ok_or_else(|| ConeError::UnknownSuite(name.to_string()))
}

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CriterionOutcome>> {
    find_suite(name)?.criteria.iter().map(|&id| run_criterion(id, seed)).collect()
}

/// Runs criterion `id` (1 to 12); `seed` drives the random corpora of criteria 11 and 12.
pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionOutcome> {
    let &(_, name, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| ConeError::param("criterion", format!("no criterion {id}")))?;
    let start = Instant::now();
    let mut rec = Recorder(Vec::new());
    match id {
        1 => ode_first_integral(&mut rec)?,
        2 => expansion_exponents(&mut rec)?,
        3 => tian_yau_rescaling(&mut rec)?,
        4 => curvature_bounds(&mut rec)?,
        5 => cusp_zones(&mut rec)?,
        6 => collapse_data(&mut rec)?,
        7 => gluing_scalings(&mut rec)?,
        8 => radial_newton(&mut rec)?,
        9 => kernel_limit_odes(&mut rec)?,
        10 => mode_decay(&mut rec)?,
        11 => cone_poisson(&mut rec, seed)?,
        _ => schauder_uniformity(&mut rec, seed)?,
    }
    Ok(CriterionOutcome {
        id,
        name: name.to_string(),
        measurements: rec.0,
        elapsed_s: start.elapsed().as_secs_f64(),
        runtime_limit_s: limit,
    })
}

fn profiles() -> Result<Vec<PotentialProfile>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for sign in [AnsatzSign::Negative, AnsatzSign::Positive] {
            out.push(PotentialProfile::new(n, sign)?);
        }
    }
    Ok(out)
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn lin_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `φ₁'` by a 9-point central difference of `eval_phi1` with a step proportional to `|t|`.
fn phi_prime_fd(p: &PotentialProfile, t: f64) -> Result<f64> {
    let h = 0.02 * t.abs().min(1.0);
    let nodes: Vec<f64> = (-4..=4).map(|k| t + h * f64::from(k)).collect();
    let w = fd_weights(t, &nodes, 1);
    let mut acc = 0.0;
    for (x, c) in nodes.iter().zip(&w[1]) {
        acc += c * p.eval_phi1(*x)?;
    }
    Ok(acc)
}

fn ode_first_integral(rec: &mut Recorder) -> Result<()> {
    let ts: Vec<f64> = log_grid(1e-3, 30.0, 1000).into_iter().map(|x| -x).collect();
    for p in profiles()? {
        let s = p.sigma();
        let np1 = (p.n() + 1) as i32;
        let (worst, worst_fd) = ts
            .par_iter()
            .map(|&t| -> Result<(f64, f64)> {
                let d = p.derivatives(t)?;
                let rhs = if s > 0.0 { -(-d.phi).exp_m1() } else { 1.0 + d.phi.exp() };
                let lhs = (-s * d.d1).powi(np1);
                let fd = (-s * phi_prime_fd(&p, t)?).powi(np1);
                Ok(((lhs - rhs).abs() / rhs.abs(), (fd - rhs).abs() / rhs.abs()))
            })
            .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))?;
        let tag = format!("n{}_{}", p.n(), p.sign().as_str());
        rec.push(format!("relative_residual_{tag}"), worst, Check::AtMost(1e-9));
        rec.push(format!("relative_residual_fd_{tag}"), worst_fd, Check::AtMost(1e-9));
    }
    Ok(())
}

fn expansion_exponents(rec: &mut Recorder) -> Result<()> {
    for n in [1, 2, 3] {
        for sign in [AnsatzSign::Negative, AnsatzSign::Positive] {
            let p = PotentialProfile::new(n, sign)?;
            // For n = 2 the e^{2t} coefficient of both expansions vanishes, the remainder is O(e^{3t})
            // and drowns in roundoff on the far window.
            let (far, check) = if n == 2 {
                (lin_grid(-6.0, -2.0, 24), Check::Info)
            } else {
                (lin_grid(-13.0, -6.0, 24), Check::Within { target: 2.0, tol: 0.05 })
            };
            let fit = p.expansion_residual(ExpansionRegime::MinusInfinity, &far)?;
            rec.push(format!("minus_infinity_slope_n{n}_{}", sign.as_str()), fit.exponent, check);
        }
        let nf = f64::from(n);
        let pos = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let near: Vec<f64> = log_grid(1e-3, 5e-2, 24).into_iter().map(|x| -x).collect();
        let fit = pos.expansion_residual(ExpansionRegime::ZeroMinus, &near)?;
        rec.push(format!("zero_minus_relative_exponent_n{n}"), fit.exponent, Check::Within { target: 1.0 + 1.0 / nf, tol: 0.1 });
        let fit = derivative_zero_fit(&pos, &log_grid(-1e-2, -1e-4, 24))?;
        rec.push(format!("derivative_zero_exponent_n{n}"), fit.exponent, Check::Within { target: 1.0 + 2.0 / nf, tol: 0.1 });
        let neg = PotentialProfile::new(n, AnsatzSign::Negative)?;
        let s_grid = log_grid(0.06, 0.25, 24);
        let t_grid: Vec<f64> = s_grid.iter().map(|s| -(nf + 1.0) * s).collect();
        let fit = neg.expansion_residual(ExpansionRegime::ZeroMinus, &t_grid)?;
        rec.push(format!("negative_zero_exponent_n{n}"), fit.exponent, Check::Within { target: 2.0 * (nf + 1.0), tol: 0.1 });
        let c = neg.negative_zero_coefficient(&log_grid(1e-3, 2e-2, 16))?;
        rec.push(format!("negative_zero_coefficient_n{n}"), c, Check::Within { target: -1.0 / (nf + 2.0), tol: 1e-4 });
    }
    Ok(())
}

fn tian_yau_rescaling(rec: &mut Recorder) -> Result<()> {
    let beta = 1e-3;
    for n in [1, 2] {
        let nf = f64::from(n);
        let sp = ScaledPotential::new(PotentialProfile::new(n, AnsatzSign::Positive)?, beta)?;
        let mut worst = 0.0_f64;
        for t in lin_grid(-5.0, -0.1, 200) {
            let model = (-nf * t / (nf + 1.0)).powf(1.0 + 1.0 / nf);
            worst = worst.max((beta.powf(-1.0 - 1.0 / nf) * sp.eval(t)? / model - 1.0).abs());
        }
        rec.push(format!("sup_relative_deviation_n{n}"), worst, Check::AtMost(0.02));
    }
    Ok(())
}

fn curvature_bounds(rec: &mut Recorder) -> Result<()> {
    let betas = [0.2, 0.1, 0.05, 0.02];
    let us: Vec<f64> = log_grid(30.0, 1e-4, 120).into_iter().map(|x| -x).collect();
    for n in [1, 2, 3] {
        let neg = PotentialProfile::new(n, AnsatzSign::Negative)?;
        let mut maxima = Vec::new();
        let mut disc = 0.0_f64;
        for &b in &betas {
            let mut m = 0.0_f64;
            for &u in &us {
                let r = curvature_quantities(&neg, b, u)?;
                m = m.max(r.max_abs_q);
                disc = disc.max(r.max_discrepancy);
            }
            maxima.push(m);
        }
        let identical = maxima.iter().all(|m| m.to_bits() == maxima[0].to_bits());
        rec.push(format!("negative_sup_q_n{n}"), maxima[0], Check::Finite);
        rec.push(format!("negative_beta_independent_n{n}"), if identical { 1.0 } else { 0.0 }, Check::AtLeast(1.0));
        rec.push(format!("negative_discrepancy_n{n}"), disc, Check::AtMost(1e-8));

        let pos = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let mut c_fit = 0.0_f64;
        let mut disc = 0.0_f64;
        for &b in &betas {
            for &u in &us {
                let r = curvature_quantities(&pos, b, u)?;
                c_fit = c_fit.max(r.max_abs_q / r.bound_estimate);
                disc = disc.max(r.max_discrepancy);
            }
        }
        rec.push(format!("positive_bound_constant_n{n}"), c_fit, Check::Finite);
        rec.push(format!("positive_discrepancy_n{n}"), disc, Check::AtMost(1e-8));
        // Divergence rate of the worst quantity in 1 − e^{−φ} as u → 0⁻.
        let near: Vec<f64> = log_grid(1e-3, 1e-6, 16).into_iter().map(|x| -x).collect();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &u in &near {
            let r = curvature_quantities(&pos, 0.1, u)?;
            xs.push(-(-pos.eval_phi1(u)?).exp_m1());
            ys.push(r.max_abs_q);
        }
        let fit = power_law_fit(&xs, &ys, 8)?;
        rec.push(format!("positive_divergence_exponent_n{n}"), fit.exponent, Check::Within { target: -1.0, tol: 0.05 });
    }
    Ok(())
}

fn cusp_zones(rec: &mut Recorder) -> Result<()> {
    let betas = [0.2, 0.1, 0.05, 0.02];
    for n in [1, 2, 3] {
        let p = PotentialProfile::new(n, AnsatzSign::Negative)?;
        let mut dev = [0.0_f64; 2];
        let mut ks = Vec::new();
        for &b in &betas {
            for (slot, (zone, u)) in [(CuspZone::BetaTtoZero, -1e-3), (CuspZone::BetaTtoMinusInfinity, -30.0)].into_iter().enumerate() {
                let r = cusp_zone_comparison(&p, b, zone, &[u / b])?[0];
                dev[slot] = dev[slot].max((r.ratio_xi - 1.0).abs()).max((r.ratio_theta - 1.0).abs());
            }
            let r = cusp_zone_comparison(&p, b, CuspZone::Middle, &[-1.0 / b])?[0];
            let k = [r.ratio_xi, 1.0 / r.ratio_xi, r.ratio_theta, 1.0 / r.ratio_theta].into_iter().fold(1.0, f64::max);
            ks.push(k);
        }
        rec.push(format!("zone_i_deviation_n{n}"), dev[0], Check::AtMost(0.01));
        rec.push(format!("zone_ii_deviation_n{n}"), dev[1], Check::AtMost(0.01));
        let kmax = ks.iter().copied().fold(f64::MIN, f64::max);
        let kmin = ks.iter().copied().fold(f64::MAX, f64::min);
        rec.push(format!("zone_iii_k_n{n}"), kmax, Check::Info);
        rec.push(format!("zone_iii_k_variation_n{n}"), kmax / kmin - 1.0, Check::AtMost(0.2));
    }
    Ok(())
}

fn collapse_data(rec: &mut Recorder) -> Result<()> {
    let betas = [0.2, 0.1, 0.05, 0.02];
    for n in [1, 2, 3] {
        let nf = f64::from(n);
        let p = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let len = radial_length(&p, f64::NEG_INFINITY, 0.0)?;
        let exact = (2.0 / (nf + 1.0)).sqrt() * FRAC_PI_2;
        rec.push(format!("interval_length_error_n{n}"), (len - exact).abs(), Check::AtMost(1e-8));
        let cp = CollapseProfile::new(p.clone(), 0.05, 1.0)?;
        let rows = limit_measure_pushforward(&cp, &lin_grid(0.0, FRAC_PI_2, 41))?;
        let err = rows.iter().fold(0.0_f64, |m, r| m.max((r.cdf - r.cdf_limit).abs()));
        rec.push(format!("cdf_error_n{n}"), err, Check::AtMost(1e-6));
        let mut vols = Vec::new();
        let mut rel = 0.0_f64;
        for &b in &betas {
            let v = model_volume(&CollapseProfile::new(p.clone(), b, 1.0)?)?;
            rel = rel.max(v.rel_diff);
            vols.push(v.quadrature);
        }
        let fit = power_law_fit(&betas, &vols, 3)?;
        rec.push(format!("volume_exponent_n{n}"), fit.exponent, Check::Within { target: nf, tol: 0.01 });
        rec.push(format!("volume_closed_form_rel_diff_n{n}"), rel, Check::AtMost(1e-8));
    }
    Ok(())
}

fn gluing_scalings(rec: &mut Recorder) -> Result<()> {
    let n = 2;
    let m = 1.5;
    let p = PotentialProfile::new(n, AnsatzSign::Positive)?;
    let scan = residual_scaling_scan(&p, n, 0.8, &[0.1, 0.05, 0.02], 0.0)?;
    for j in 0..3 {
        let jf = j as f64;
        rec.push(
            format!("potential_difference_exponent_j{j}"),
            scan.potential_difference[j].exponent,
            Check::Within { target: (2.0 - jf / 2.0) * m, tol: 0.1 },
        );
        rec.push(format!("residual_exponent_j{j}"), scan.residual[j].exponent, Check::Within { target: (1.0 - jf / 2.0) * m, tol: 0.1 });
    }
    for (j, fit) in scan.cutoff.iter().enumerate() {
        let jf = (j + 1) as f64;
        rec.push(format!("cutoff_exponent_j{}", j + 1), fit.exponent, Check::Within { target: -jf / 2.0 * m, tol: 0.1 });
    }
    rec.push("weighted_residual_exponent", scan.weighted_residual.exponent, Check::Within { target: 0.8 * 2.0 * m, tol: 0.1 });
    Ok(())
}

fn radial_newton(rec: &mut Recorder) -> Result<()> {
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let opts = NewtonOptions::default();
    let mut corrections = Vec::new();
    for mu in [0.5, 0.7, 0.8, 0.9] {
        let model = GlueModel::with_profile(GlueConfig::new(2, 0.1, mu)?, p.clone())?;
        let out = newton_solve_radial(&model, &glued_field(&model, opts.nodes)?, opts)?;
        if mu == 0.8 {
            let exact = calabi_field(&model, opts.nodes)?;
            let dev = out.field.values.iter().zip(&exact.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            let tr = &out.trace;
            rec.push("final_residual", tr[tr.len() - 1], Check::AtMost(1e-10));
            let order = if tr.len() >= 3 { tr[tr.len() - 1].ln() / tr[tr.len() - 2].ln() } else { f64::NAN };
            rec.push("terminal_order", order, Check::AtLeast(1.5));
            rec.push("iterations", out.iterations as f64, Check::Info);
            rec.push("match_calabi", dev, Check::AtMost(1e-8));
        } else {
            corrections.push(out.correction_sup);
        }
    }
    for (mu, c) in [0.5, 0.7, 0.9].iter().zip(&corrections) {
        rec.push(format!("correction_mu{mu}"), *c, Check::Info);
    }
    let monotone = corrections.windows(2).all(|w| w[1] < w[0]);
    rec.push("correction_monotone_in_mu", if monotone { 1.0 } else { 0.0 }, Check::AtLeast(1.0));
    Ok(())
}

fn kernel_limit_odes(rec: &mut Recorder) -> Result<()> {
    for n in [1, 2, 3] {
        let p = PotentialProfile::new(n, AnsatzSign::Positive)?;
        let grid = |nodes: usize| lin_grid(-40.0, -0.05, nodes);
        let coarse = kernel_solutions(&p, &grid(2000))?;
        let fine = kernel_solutions(&p, &grid(4000))?;
        let order = (coarse.residual_first / fine.residual_first).log2();
        rec.push(format!("residual_first_n{n}"), fine.residual_first, Check::AtMost(1e-4));
        rec.push(format!("residual_order_first_n{n}"), order, Check::AtLeast(1.8));
        let order2 = (coarse.residual_second / fine.residual_second).log2();
        rec.push(format!("residual_order_second_n{n}"), order2, Check::AtLeast(1.8));
        let slope = fine.slope_second.map(|s| s.exponent).unwrap_or(f64::NAN);
        rec.push(format!("second_solution_slope_n{n}"), slope, Check::Within { target: 1.0, tol: 0.05 });
        rec.push(format!("orthogonality_integral_n{n}"), fine.orthogonality, Check::Within { target: fine.orthogonality_expected, tol: 1e-8 });
        rec.push(format!("orthogonality_nonzero_n{n}"), fine.orthogonality.abs(), Check::AtLeast(0.1));
    }
    Ok(())
}

fn mode_decay(rec: &mut Recorder) -> Result<()> {
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let cases: Vec<(f64, u32)> = [0.1, 0.05].iter().flat_map(|&b| [1, 2, 4].map(|l| (b, l))).collect();
    let reports = cases
        .par_iter()
        .map(|&(b, l)| mode_decay_check(&p, b, l, -1.0, 0.5, 0.5))
        .collect::<Result<Vec<_>>>()?;
    let c = reports.iter().map(|r| r.ratio_to_bound).fold(0.0, f64::max);
    rec.push("fitted_constant", c, Check::Finite);
    let mut worst_ell = f64::INFINITY;
    let mut worst_beta = f64::INFINITY;
    let mut barrier = 0.0_f64;
    for (i, r) in reports.iter().enumerate() {
        barrier = barrier.max(r.sup_inner / r.barrier);
        if r.ell < 4 {
            worst_ell = worst_ell.min(r.sup_inner / reports[i + 1].sup_inner);
        }
        if r.beta == 0.1 {
            worst_beta = worst_beta.min(r.sup_inner / reports[i + 3].sup_inner);
        }
    }
    rec.push("min_drop_doubling_ell", worst_ell, Check::AtLeast(4.0));
    rec.push("min_drop_halving_beta", worst_beta, Check::AtLeast(2.0));
    rec.push("max_sup_over_barrier", barrier, Check::AtMost(1.0));
    Ok(())
}

/// Mode solver against the Green representation and the closed form for one corpus problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverComparison {
    pub problem: usize,
    pub beta: f64,
    pub mode_vs_green: f64,
    pub mode_vs_closed_form: f64,
    pub tail_energy: f64,
}

/// Solves each corpus problem on an `n_r × 64` graded grid, cycling through `betas`, and
/// compares at six fixed nodes spread from the apex to the boundary.
pub fn solver_comparison(betas: &[f64], spec: &CorpusSpec, n_r: usize) -> Result<Vec<SolverComparison>> {
    if betas.is_empty() {
        return Err(ConeError::param("beta", "empty list"));
    }
    if n_r < 16 {
        return Err(ConeError::param("grid", format!("need at least 16 rings, got {n_r}")));
    }
    let problems = corpus(spec, 0.5);
    let last = n_r - 1;
    let nodes = [(0usize, 0usize), (last / 8, 3), (3 * last / 8, 10), (5 * last / 8, 20), (5 * last / 6, 40), (last, 63)];
    problems
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<SolverComparison> {
            let beta = betas[i % betas.len()];
            let disk = ConeDisk::standard(beta)?;
            let grid = PolarGrid::graded(&disk, n_r, 64)?;
            let f = PolarField::from_fn(&grid, |r, t| p.source.value(r, t));
            let g = |t: f64| -> f64 { p.boundary.iter().map(|b| b.amp * (f64::from(b.k) * t + b.phase).cos()).sum() };
            let bd: Vec<f64> = (0..grid.n_theta).map(|j| g(grid.theta(j))).collect();
            let (u, report) = poisson_solve_modes(&disk, &f, &bd, ModeSolveOptions::default())?;
            let exact = solve_closed_form(&disk, &p.source, &p.boundary)?;
            let mut green = 0.0_f64;
            let mut closed = 0.0_f64;
            for &(ii, j) in &nodes {
                let (r, th) = (grid.r[ii], grid.theta(j));
                let v = green_representation(&disk, &|r, t| p.source.value(r, t), &g, r, th, GreenOptions::default())?;
                green = green.max((v - u.at(ii, j)).abs());
                closed = closed.max((exact.value(r, th) - u.at(ii, j)).abs());
            }
            Ok(SolverComparison { problem: i, beta, mode_vs_green: green, mode_vs_closed_form: closed, tail_energy: report.tail_energy })
        })
        .collect()
}

fn cone_poisson(rec: &mut Recorder, seed: u64) -> Result<()> {
    let betas = [0.45, 0.25, 0.1, 0.05];
    let diffs = solver_comparison(&betas, &CorpusSpec { seed, ..CorpusSpec::default() }, 400)?;
    rec.push("mode_vs_green", diffs.iter().map(|d| d.mode_vs_green).fold(0.0, f64::max), Check::AtMost(1e-6));
    rec.push("mode_vs_closed_form", diffs.iter().map(|d| d.mode_vs_closed_form).fold(0.0, f64::max), Check::Info);

    // Δr² = 4 and discrete harmonicity of r^{k/β}cos kθ, with the observed order under refinement.
    let disk = ConeDisk::standard(0.25)?;
    let mut quad_err = 0.0_f64;
    let mut harm = Vec::new();
    for (n_r, n_t) in [(100, 64), (200, 128)] {
        let grid = PolarGrid::graded(&disk, n_r, n_t)?;
        let l = laplacian_apply(&disk, &PolarField::from_fn(&grid, |r, _| r * r))?;
        for i in 0..grid.r.len() - 1 {
            quad_err = quad_err.max((l.at(i, 0) - 4.0).abs());
        }
        let k = 2.0;
        let nu = k / disk.beta;
        let u = PolarField::from_fn(&grid, |r, t| r.powf(nu) * (k * t).cos());
        let l = laplacian_apply(&disk, &u)?;
        let mut worst = 0.0_f64;
        for (i, &r) in grid.r.iter().enumerate() {
            if r >= 0.2 * disk.radius && r <= 0.9 * disk.radius {
                let scale = nu * nu * r.powf(nu - 2.0);
                for j in 0..grid.n_theta {
                    worst = worst.max(l.at(i, j).abs() / scale);
                }
            }
        }
        harm.push(worst);
    }
    // The stencil is exact on quadratics; what remains is roundoff amplified by 1/h² at the finest rings.
    rec.push("laplacian_of_r2_error", quad_err, Check::AtMost(1e-7));
    rec.push("harmonic_residual", harm[1], Check::AtMost(1e-2));
    rec.push("harmonic_residual_order", (harm[0] / harm[1]).log2(), Check::AtLeast(1.8));

    // Maximum principle on a positive corpus with zero boundary values.
    let positive = corpus(&CorpusSpec { seed, problems: 8, with_boundary: false, positive: true, ..CorpusSpec::default() }, 0.5);
    let worst = positive
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<f64> {
            let disk = ConeDisk::standard(betas[i % betas.len()])?;
            let grid = PolarGrid::graded(&disk, 200, 64)?;
            let f = PolarField::from_fn(&grid, |r, t| p.source.value(r, t));
            let (u, _) = poisson_solve_modes(&disk, &f, &vec![0.0; grid.n_theta], ModeSolveOptions::default())?;
            let mut m = u.max();
            for &(r, t) in &[(0.0, 0.0), (0.2, 1.0), (0.4, 4.0)] {
                m = m.max(green_representation(&disk, &|r, t| p.source.value(r, t), &|_| 0.0, r, t, GreenOptions::default())?);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    rec.push("max_solution_positive_source", worst, Check::AtMost(1e-12));

    // Gradient-bound constants, recorded across β and ρ.
    let r_samples: Vec<f64> = (1..24).map(|i| 0.5 * f64::from(i) / 24.0).collect();
    for row in gradient_bound_probe(&[0.25, 0.1, 0.05], &CorpusSpec { seed, problems: 8, ..CorpusSpec::default() }, &r_samples)? {
        rec.push(format!("gradient_bound_constant_beta{}", row.beta), row.constant, Check::Finite);
    }
    let boundary = [BoundaryTerm { k: 0, amp: 0.3, phase: 0.0 }, BoundaryTerm { k: 1, amp: 1.0, phase: 0.4 }, BoundaryTerm { k: 2, amp: 0.5, phase: 1.0 }];
    let mut interior = 0.0_f64;
    for beta in [0.45, 0.25, 0.1, 0.05] {
        for rho in [0.25, 0.5, 1.0] {
            interior = interior.max(interior_gradient_constant(beta, rho, &boundary)?);
        }
        rec.push(format!("divisor_gradient_constant_beta{beta}"), divisor_gradient_constant(beta, 0.5, 0.5)?, Check::Finite);
    }
    rec.push("interior_gradient_constant", interior, Check::Finite);
    Ok(())
}

/// β-sweep of the Schauder probe.
pub const SCHAUDER_BETAS: [f64; 5] = [0.45, 0.25, 0.1, 0.05, 0.02];

fn schauder_uniformity(rec: &mut Recorder, seed: u64) -> Result<()> {
    let spec = CorpusSpec { seed, problems: 12, ..CorpusSpec::default() };
    let table = schauder_probe(&SCHAUDER_BETAS, 0.5, &spec, &SamplingBudget::default())?;
    for row in &table.rows {
        rec.push(format!("donaldson_ratio_beta{}", row.beta), row.donaldson_max, Check::Info);
        rec.push(format!("full_ratio_beta{}", row.beta), row.full_max, Check::Info);
        rec.push(format!("decay_ratio_beta{}", row.beta), row.decay_max, Check::Info);
    }
    rec.push("donaldson_variation", table.donaldson_variation, Check::AtMost(3.0));
    rec.push("full_variation", table.full_variation, Check::AtMost(3.0));
    // Uniform upper bound: no β of the sweep exceeds three times the largest-β value.
    let first = table.rows[0].decay_max;
    let growth = table.rows.iter().map(|r| r.decay_max / first).fold(0.0, f64::max);
    rec.push("decay_growth_over_sweep", growth, Check::AtMost(3.0));
    rec.push("decay_variation", table.decay_variation, Check::AtMost(3.0));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_enough_suites_and_rejects_unknown() {
        assert!(suites().len() >= 8);
        assert!(matches!(find_suite("nope"), Err(ConeError::UnknownSuite(_))));
        for s in suites() {
            assert!(s.criteria.iter().all(|c| (1..=12).contains(c)));
        }
    }
}
