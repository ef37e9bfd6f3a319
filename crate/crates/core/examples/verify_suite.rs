// Run a verification suite from the registry and print a line per criterion.

use conelab::verify::run_suite;
use conelab::Result;

/// Runs the `collapse` suite and returns whether every criterion passed.
pub fn run_example() -> Result<bool> {
    let outcomes = run_suite("collapse", 7)?;
    for o in &outcomes {
        println!("{:>2} {:<24} {}", o.id, o.name, if o.passed() { "PASS" } else { "FAIL" });
    }
    Ok(outcomes.iter().all(|o| o.passed()))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
