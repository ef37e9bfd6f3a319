// Glue the Calabi and Tian–Yau potentials, then correct the glued potential by Newton.

use conelab::glue::{calabi_field, glued_field, newton_solve_radial, residual_scaling_scan, GlueConfig, GlueModel, NewtonOptions};
use conelab::{AnsatzSign, PotentialProfile, Result};

/// Returns the Newton residual history and the distance of the solution to the Calabi potential.
pub fn run_example() -> Result<(Vec<f64>, f64)> {
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let scan = residual_scaling_scan(&p, 2, 0.8, &[0.1, 0.05, 0.02], 0.0)?;
    for (j, f) in scan.residual.iter().enumerate() {
        println!("residual order {j}: exponent {:.3}", f.exponent);
    }
    let model = GlueModel::with_profile(GlueConfig::new(2, 0.1, 0.8)?, p)?;
    let opts = NewtonOptions::default();
    let out = newton_solve_radial(&model, &glued_field(&model, opts.nodes)?, opts)?;
    let exact = calabi_field(&model, opts.nodes)?;
    let dist = out.field.values.iter().zip(&exact.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    println!("newton residuals {:?}", out.trace);
    println!("distance to the Calabi potential {dist:.2e}");
    Ok((out.trace, dist))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
