//! Every example runs and produces values consistent with independent expectations.

#[allow(dead_code)]
mod potential_constants {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/potential_constants.rs"));
}
#[allow(dead_code)]
mod curvature {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/curvature.rs"));
}
#[allow(dead_code)]
mod collapse_limits {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/collapse_limits.rs"));
}
#[allow(dead_code)]
mod glue_newton {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/glue_newton.rs"));
}
#[allow(dead_code)]
mod limit_operator {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/limit_operator.rs"));
}
#[allow(dead_code)]
mod cone_poisson {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cone_poisson.rs"));
}
#[allow(dead_code)]
mod schauder_probe {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/schauder_probe.rs"));
}
#[allow(dead_code)]
mod verify_suite {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verify_suite.rs"));
}

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

#[test]
fn potential_constants_example() {
    let (c, phi) = potential_constants::run_example().unwrap();
    assert!((c[0].0 - 2.0 * LN_2).abs() < 1e-13);
    assert!((c[0].1 - 2.0 * LN_2).abs() < 1e-13);
    assert!(phi > 0.0);
}

#[test]
fn curvature_example() {
    assert!(curvature::run_example().unwrap() < 1e-8);
}

#[test]
fn collapse_limits_example() {
    let (len, cdf, vol) = collapse_limits::run_example().unwrap();
    assert!((len - (2.0_f64 / 3.0).sqrt() * FRAC_PI_2).abs() < 1e-10);
    assert!(cdf < 1e-6);
    // βⁿ·2π·vol_D/n with vol_D = 1, n = 2, β = 0.05.
    assert!((vol - 0.05_f64.powi(2) * PI).abs() < 1e-10);
}

#[test]
fn glue_newton_example() {
    let (trace, dist) = glue_newton::run_example().unwrap();
    assert!(*trace.last().unwrap() < 1e-10);
    assert!(dist < 1e-8);
}

#[test]
fn limit_operator_example() {
    let (orth, sups) = limit_operator::run_example().unwrap();
    assert!((orth - 1.0 / 3.0).abs() < 1e-8);
    assert!(sups[0] / sups[1] >= 4.0);
}

#[test]
fn cone_poisson_example() {
    let (modes, green) = cone_poisson::run_example().unwrap();
    // Radial solution (r² − R²)/4 at r = 0 with R = 1/2.
    assert!((modes + 0.0625).abs() < 1e-10);
    assert!((green + 0.0625).abs() < 1e-9);
}

#[test]
fn schauder_probe_example() {
    assert!(schauder_probe::run_example().unwrap() < 3.0);
}

#[test]
fn verify_suite_example() {
    assert!(verify_suite::run_example().unwrap());
}
