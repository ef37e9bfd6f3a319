// Curvature quantities of the model metric, two independent ways.

use conelab::metric::curvature_quantities;
use conelab::{AnsatzSign, PotentialProfile, Result};

/// Largest closed-form vs ODE discrepancy over both signs, n = 1..3 and a sweep of u.
pub fn run_example() -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        for sign in [AnsatzSign::Negative, AnsatzSign::Positive] {
            let p = PotentialProfile::new(n, sign)?;
            for u in [-20.0, -5.0, -1.0, -0.1, -1e-3] {
                let r = curvature_quantities(&p, 0.1, u)?;
                worst = worst.max(r.max_discrepancy);
            }
            let r = curvature_quantities(&p, 0.1, -1.0)?;
            println!("n={n} {:>3}  q(u=-1) = {:?}", sign.as_str(), r.q);
        }
    }
    println!("largest discrepancy {worst:.2e}");
    Ok(worst)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
