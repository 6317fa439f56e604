//! A 2-wheel driven by a 3-wheel and a 5-wheel under both tick policies.

use cma::cluster::{simulate, ClusterNode, TickPolicy};
use cma::menagerie::wheel;

fn main() -> cma::error::Result<()> {
    let base = ClusterNode::leaf(wheel(2), 1)
        .with_inner("q0", ClusterNode::leaf(wheel(3), 0))?
        .with_inner("q1", ClusterNode::leaf(wheel(5), 0))?;
    for policy in [TickPolicy::Union, TickPolicy::CurrentState] {
        let r = simulate(&base.clone().with_policy(policy), 100_000, 0);
        println!(
            "{policy:<14} outer steps {:>6}  occupancy {:?}",
            r.outer_steps,
            r.occupancy.to_f64()
        );
    }
    Ok(())
}
