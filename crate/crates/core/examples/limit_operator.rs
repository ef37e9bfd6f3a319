// Kernel of the limit operator and the decay of the collapsing circle modes.

use conelab::glue::{kernel_solutions, mode_decay_check};
use conelab::{AnsatzSign, PotentialProfile, Result};

/// Returns the orthogonality integral at n = 2 and the ℓ = 1, 2 decay sups at β = 0.1.
pub fn run_example() -> Result<(f64, [f64; 2])> {
    let p = PotentialProfile::new(2, AnsatzSign::Positive)?;
    let grid: Vec<f64> = (0..2000).map(|i| -40.0 + (40.0 - 0.05) * f64::from(i) / 1999.0).collect();
    let k = kernel_solutions(&p, &grid)?;
    println!("orthogonality integral {:.12} (expected {:.12})", k.orthogonality, k.orthogonality_expected);
    let mut sups = [0.0; 2];
    for (slot, ell) in [1, 2].into_iter().enumerate() {
        let r = mode_decay_check(&p, 0.1, ell, -1.0, 0.5, 0.5)?;
        println!("ell={ell}: sup {:.4e} barrier {:.4e}", r.sup_inner, r.barrier);
        sups[slot] = r.sup_inner;
    }
    Ok((k.orthogonality, sups))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
