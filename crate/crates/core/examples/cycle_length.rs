use cma::cluster::{cycle_length, prime_power_construction, wheel_cluster_cycle, ClusterNode, WheelCluster};
use cma::menagerie::wheel;

fn main() -> cma::error::Result<()> {
    let small = ClusterNode::leaf(wheel(2), 1)
        .with_inner("q0", ClusterNode::leaf(wheel(3), 0))?
        .with_inner("q1", ClusterNode::leaf(wheel(5), 0))?;
    let c = cycle_length(&small)?;
    println!("S2{{S3, S5}}: {} ticks (checked by running it: {})", c.value, c.simulated);

    let nested = WheelCluster::wheel(3).with_inner(vec![
        WheelCluster::wheel(2).with_inner(vec![WheelCluster::wheel(7)]),
        WheelCluster::wheel(4),
    ]);
    println!("depth-3 descriptor: {} ticks", wheel_cluster_cycle(&nested)?.value);

    for m in [100, 1000, 10_000] {
        let big = wheel_cluster_cycle(&prime_power_construction(m))?;
        println!("prime powers below {m:>6}: a {}-digit cycle", big.digits);
    }
    Ok(())
}
