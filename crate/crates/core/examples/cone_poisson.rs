// Solve Δu = 1 on a cone disk with zero boundary values by Fourier modes and by the Green function.

use conelab::cone::{green_representation, poisson_solve_modes, ConeDisk, GreenOptions, ModeSolveOptions, PolarField, PolarGrid};
use conelab::Result;

/// Returns `(mode solver, Green representation)` at the apex for β = 0.1.
pub fn run_example() -> Result<(f64, f64)> {
    let disk = ConeDisk::standard(0.1)?;
    let grid = PolarGrid::graded(&disk, 200, 64)?;
    let f = PolarField::from_fn(&grid, |_, _| 1.0);
    let (u, report) = poisson_solve_modes(&disk, &f, &vec![0.0; grid.n_theta], ModeSolveOptions::default())?;
    let g = green_representation(&disk, &|_, _| 1.0, &|_| 0.0, 0.0, 0.0, GreenOptions::default())?;
    println!("apex value: modes {:.12}, green {:.12}, tail energy {:.1e}", u.at(0, 0), g, report.tail_energy);
    Ok((u.at(0, 0), g))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
