//! Finds the smallest labeled wheel whose signal shares approximate a
//! distribution, for a few tolerances.

use cma::analysis::{approximate_distribution, cycle_occupancy, FiniteDistribution};
use cma::machine::Constraints;

fn main() -> cma::error::Result<()> {
    let d = FiniteDistribution::new(
        vec!["rain".into(), "cloud".into(), "sun".into()],
        vec![0.25, 0.35, 0.4],
    )?;
    for eps in [0.1, 0.01, 0.001] {
        let a = approximate_distribution(&d, eps, &Constraints::default())?;
        let occ = cycle_occupancy(&a.machine)?.by_signal(&a.machine);
        println!("eps {eps:<6} wheel of {:>3} states, counts {:?}, shares {:?}", a.size, a.counts, occ.to_f64());
    }
    Ok(())
}
