//! The looped 2-wheel read two ways: counting paths gives the golden ratio,
//! a uniform random walk gives two thirds.

use cma::analysis::{monte_carlo_occupancy, path_count_occupancy, stationary_distribution};
use cma::menagerie::looped_two_wheel;

fn main() -> cma::error::Result<()> {
    let m = looped_two_wheel();
    for n in [5, 10, 20, 40] {
        let v = path_count_occupancy(&m, n)?;
        println!("paths of length {n:>2}: q0 share {} = {:.6}", v.get_exact("q0").unwrap(), v.get("q0").unwrap());
    }
    let pi = stationary_distribution(&m)?;
    println!("stationary: {:?}", pi.to_f64());
    let mc = monte_carlo_occupancy(&m, 1_000_000, 42)?;
    println!("sampled over 10^6 steps: {:?}", mc.to_f64());
    Ok(())
}
