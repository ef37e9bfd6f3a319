// Length of the limit interval, the limit measure and the volume of the collapsing model.

use std::f64::consts::FRAC_PI_2;

use conelab::collapse::{limit_measure_pushforward, model_volume, radial_length, CollapseProfile};
use conelab::{AnsatzSign, PotentialProfile, Result};

/// Returns `(interval length, max CDF error, volume at β = 0.05)` for n = 2.
pub fn run_example() -> Result<(f64, f64, f64)> {
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let len = radial_length(&p, f64::NEG_INFINITY, 0.0)?;
    let cp = CollapseProfile::new(p, 0.05, 1.0)?;
    let s: Vec<f64> = (0..=20).map(|i| FRAC_PI_2 * f64::from(i) / 20.0).collect();
    let cdf_err = limit_measure_pushforward(&cp, &s)?.iter().fold(0.0_f64, |m, r| m.max((r.cdf - r.cdf_limit).abs()));
    let vol = model_volume(&cp)?;
    println!("interval length {len:.15}");
    println!("limit CDF error {cdf_err:.2e}");
    println!("volume {:.15} (closed form {:.15})", vol.quadrature, vol.closed_form);
    Ok((len, cdf_err, vol.quadrature))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
