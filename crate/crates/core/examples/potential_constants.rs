// Integration constants and the radial potential for both signs.

use conelab::{constants, AnsatzSign, PotentialProfile, Result};

/// Returns `(I_n, J_n)` for n = 1, 2, 3 and `φ₁(−1)` for the positive sign at n = 2.
pub fn run_example() -> Result<(Vec<(f64, f64)>, f64)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let c = constants(n)?;
        println!("n={n}  I_n={:.15}  J_n={:.15}  c_n={:.6}", c.i_n, c.j_n, c.c_n);
        out.push((c.i_n, c.j_n));
    }
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let phi = p.eval_phi1(-1.0)?;
    let d = p.derivatives(-1.0)?;
    println!("phi_1(-1) = {phi:.15}, phi' = {:.15}, phi'' = {:.15}", d.d1, d.d2);
    Ok((out, phi))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
