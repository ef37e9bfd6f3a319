//! Checks against oracles that share no code with the library: closed forms, an external
//! Gauss–Legendre rule, bisection, and finite differences.

use std::f64::consts::LN_2;
use std::num::NonZeroUsize;

use conelab::cone::{laplacian_apply, ConeDisk, PolarField, PolarGrid};
use conelab::glue::{mode_operator_apply, MetricTag, RadialField, RadialVariable};
use conelab::metric::{from_s, metric_in_s, metric_in_s_pullback, to_moment_coords};
use conelab::{constants, AnsatzSign, PotentialProfile};
use gauss_quad::GaussLegendre;

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels of 20 nodes.
fn gl(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
    let h = (b - a) / panels as f64;
    (0..panels).map(|k| rule.integrate(a + k as f64 * h, a + (k + 1) as f64 * h, &f)).sum()
}

/// `F_+(x) = ∫_0^x (1 − e^{−y})^{−1/(n+1)} dy`, with `y = w^{n+1}` removing the endpoint singularity.
fn f_plus_oracle(n: u32, x: f64) -> f64 {
    let np1 = f64::from(n + 1);
    gl(0.0, x.powf(1.0 / np1), 40, |w| {
        let y = w.powf(np1);
        np1 * w.powf(np1 - 1.0) * (-(-y).exp_m1()).powf(-1.0 / np1)
    })
}

#[test]
fn f_plus_at_n1_matches_the_artanh_closed_form() {
    let p = PotentialProfile::new(1, AnsatzSign::Positive).unwrap();
    let exact = 2.0 * (-(-5.0_f64).exp_m1()).sqrt().atanh();
    assert!((p.eval_f(5.0).unwrap() - exact).abs() < 1e-12);
    assert!((f_plus_oracle(1, 5.0) - exact).abs() < 1e-12);
}

#[test]
fn f_plus_matches_gauss_legendre_for_n2_and_n3() {
    for n in [2, 3] {
        let p = PotentialProfile::new(n, AnsatzSign::Positive).unwrap();
        for x in [0.01, 0.5, 2.0, 7.0] {
            let lib = p.eval_f(x).unwrap();
            let oracle = f_plus_oracle(n, x);
            assert!((lib - oracle).abs() < 1e-11 * oracle.max(1.0), "n={n} x={x}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn i_n_matches_gauss_legendre_and_two_log_two() {
    // I_n = ∫_0^∞ (1+e^y)^{−a} dy − ∫_{−∞}^0 (1 − (1+e^y)^{−a}) dy, a = 1/(n+1).
    for n in 1..=3 {
        let a = 1.0 / f64::from(n + 1);
        let right = gl(0.0, 200.0, 400, |y| (-a * (y + (-y).exp().ln_1p())).exp());
        let left = gl(-60.0, 0.0, 120, |y| -(-a * y.exp().ln_1p()).exp_m1());
        let c = constants(n).unwrap();
        assert!((c.i_n - (right - left)).abs() < 1e-11, "n={n}: {} vs {}", c.i_n, right - left);
    }
    assert!((constants(1).unwrap().i_n - 2.0 * LN_2).abs() < 1e-13);
    assert!((constants(1).unwrap().j_n - 2.0 * LN_2).abs() < 1e-13);
}

#[test]
fn phi_at_minus_ten_matches_bisection_on_the_oracle_integral() {
    // For the positive sign t = −F_+(φ₁(t)).
    let p = PotentialProfile::new(2, AnsatzSign::Positive).unwrap();
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f_plus_oracle(2, mid) < 10.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = p.eval_phi1(-10.0).unwrap();
    assert!((phi - 0.5 * (lo + hi)).abs() < 1e-10, "{phi} vs {}", 0.5 * (lo + hi));
}

#[test]
fn second_derivative_matches_finite_differences() {
    for sign in [AnsatzSign::Negative, AnsatzSign::Positive] {
        let p = PotentialProfile::new(2, sign).unwrap();
        for t in [-8.0, -2.0, -0.5] {
            let h = 1e-2;
            let f = |x: f64| p.eval_phi1(x).unwrap();
            let fd = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
            let d2 = p.derivatives(t).unwrap().d2;
            assert!((fd - d2).abs() < 1e-6 * d2.abs().max(1e-3), "{sign:?} t={t}: {fd} vs {d2}");
        }
    }
}

#[test]
fn moment_angle_round_trips() {
    let p = PotentialProfile::new(3, AnsatzSign::Positive).unwrap();
    for u in [-12.0, -3.0, -0.2, -1e-3] {
        let s = to_moment_coords(&p, u).unwrap().s;
        let back = from_s(&p, s).unwrap();
        assert!((back - u).abs() < 1e-9 * u.abs().max(1.0), "u={u} → s={s} → {back}");
    }
}

#[test]
fn metric_in_s_agrees_with_the_pullback() {
    let p = PotentialProfile::new(2, AnsatzSign::Positive).unwrap();
    for s in [0.05, 0.4, 1.0, 1.5] {
        let a = metric_in_s(&p, 0.1, s).unwrap();
        let b = metric_in_s_pullback(&p, 0.1, s).unwrap();
        for (x, y) in [(a.coeff_ds2, b.coeff_ds2), (a.coeff_eta2, b.coeff_eta2), (a.coeff_gd, b.coeff_gd)] {
            assert!((x - y).abs() < 1e-9 * x.abs(), "s={s}: {x} vs {y}");
        }
    }
}

#[test]
fn discrete_laplacian_of_a_harmonic_function_is_second_order() {
    let disk = ConeDisk::standard(0.25).unwrap();
    let nu = 1.0 / disk.beta;
    let mut errs = Vec::new();
    for (n_r, n_t) in [(80, 64), (160, 128), (320, 256)] {
        let grid = PolarGrid::graded(&disk, n_r, n_t).unwrap();
        let u = PolarField::from_fn(&grid, |r, t| r.powf(nu) * t.cos());
        let l = laplacian_apply(&disk, &u).unwrap();
        let mut worst = 0.0_f64;
        for (i, &r) in grid.r.iter().enumerate() {
            if (0.25 * disk.radius..=0.75 * disk.radius).contains(&r) {
                worst = worst.max(l.at(i, 0).abs() / (nu * nu * r.powf(nu - 2.0)));
            }
        }
        errs.push(worst);
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
    }
}

#[test]
fn mode_operator_on_a_manufactured_field() {
    let p = PotentialProfile::new(2, AnsatzSign::Positive).unwrap();
    let (beta, ell) = (0.4, 1);
    let exact = |u: f64| {
        let d = p.derivatives(u).unwrap();
        let k2 = f64::from(ell * ell) / (4.0 * beta * beta);
        2.0 / d.d2 * (-u.sin() - k2 * u.sin()) + 2.0 / d.d1 * u.cos()
    };
    let mut errs = Vec::new();
    for nodes in [200, 400] {
        let grid: Vec<f64> = (0..nodes).map(|i| -3.0 + 2.5 * i as f64 / (nodes - 1) as f64).collect();
        let field = RadialField::new(RadialVariable::U, MetricTag::CalabiModel, grid.clone(), grid.iter().map(|u| u.sin()).collect()).unwrap();
        let out = mode_operator_apply(&p, beta, ell, &field).unwrap();
        let worst = grid[1..nodes - 1].iter().zip(&out.values[1..nodes - 1]).fold(0.0_f64, |m, (&u, v)| m.max((v - exact(u)).abs()));
        errs.push(worst);
    }
    assert!(errs[1] < 1e-3, "{errs:?}");
    assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
}
