//! Property-based checks over random parameters.

use conelab::cone::{poisson_solve_modes, ConeDisk, ModeSolveOptions, PolarField, PolarGrid};
use conelab::glue::cutoff;
use conelab::metric::curvature_quantities;
use conelab::{AnsatzSign, PotentialProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_integral_holds_at_random_points(n in 1u32..=3, pos in any::<bool>(), lt in -3.0f64..1.4) {
        let sign = if pos { AnsatzSign::Positive } else { AnsatzSign::Negative };
        let p = PotentialProfile::new(n, sign).unwrap();
        let t = -(10f64.powf(lt));
        let d = p.derivatives(t).unwrap();
        let s = sign.sigma();
        let rhs = if pos { -(-d.phi).exp_m1() } else { 1.0 + d.phi.exp() };
        prop_assert!(((-s * d.d1).powi(n as i32 + 1) - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn phi_is_monotone(n in 1u32..=3, pos in any::<bool>(), a in 0.001f64..20.0, gap in 0.001f64..5.0) {
        let sign = if pos { AnsatzSign::Positive } else { AnsatzSign::Negative };
        let p = PotentialProfile::new(n, sign).unwrap();
        let (t1, t2) = (-a - gap, -a);
        let (f1, f2) = (p.eval_phi1(t1).unwrap(), p.eval_phi1(t2).unwrap());
        if pos { prop_assert!(f1 > f2) } else { prop_assert!(f1 < f2) }
    }

    #[test]
    fn negative_curvature_is_beta_independent(n in 1u32..=3, u in -25.0f64..-1e-4, b1 in 0.01f64..0.99, b2 in 0.01f64..0.99) {
        let p = PotentialProfile::new(n, AnsatzSign::Negative).unwrap();
        let q1 = curvature_quantities(&p, b1, u).unwrap().q;
        let q2 = curvature_quantities(&p, b2, u).unwrap().q;
        prop_assert_eq!(q1, q2);
    }

    #[test]
    fn cutoff_stays_in_unit_interval(y in -5.0f64..5.0) {
        let c = cutoff(y)[0];
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn mode_solver_is_linear(beta in 0.05f64..0.45, lambda in -5.0f64..5.0, k in 0u32..3) {
        let disk = ConeDisk::standard(beta).unwrap();
        let grid = PolarGrid::graded(&disk, 60, 64).unwrap();
        let f = PolarField::from_fn(&grid, |r, t| 1.0 + r * (f64::from(k) * t).cos());
        let lf = PolarField::from_fn(&grid, |r, t| lambda * (1.0 + r * (f64::from(k) * t).cos()));
        let zero = vec![0.0; grid.n_theta];
        let (u, _) = poisson_solve_modes(&disk, &f, &zero, ModeSolveOptions::default()).unwrap();
        let (lu, _) = poisson_solve_modes(&disk, &lf, &zero, ModeSolveOptions::default()).unwrap();
        let scale = u.sup_abs().max(1e-300);
        for i in 0..grid.r.len() {
            for j in 0..grid.n_theta {
                prop_assert!((lu.at(i, j) - lambda * u.at(i, j)).abs() <= 1e-12 * scale * lambda.abs().max(1.0));
            }
        }
    }
}
