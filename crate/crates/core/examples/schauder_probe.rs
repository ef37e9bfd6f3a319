// Sampled Schauder ratios on a small corpus for two cone angles.

use conelab::schauder::{schauder_probe, CorpusSpec, SamplingBudget};
use conelab::Result;

/// Returns the Donaldson-norm variation across the two angles.
pub fn run_example() -> Result<f64> {
    let spec = CorpusSpec { problems: 4, ..CorpusSpec::default() };
    let budget = SamplingBudget { n_r: 20, n_theta: 24, random_pairs: 2000, ..SamplingBudget::default() };
    let table = schauder_probe(&[0.25, 0.05], 0.5, &spec, &budget)?;
    for r in &table.rows {
        println!("beta={:<5} donaldson {:.4} full {:.4} decay {:.3e}", r.beta, r.donaldson_max, r.full_max, r.decay_max);
    }
    println!("donaldson variation {:.3}", table.donaldson_variation);
    Ok(table.donaldson_variation)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
