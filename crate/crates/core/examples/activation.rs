//! Grief needs both the death and the parenthood to reach it.

use cma::lingua::ActivationNetwork;

fn run(label: &str, mut net: ActivationNetwork) -> cma::error::Result<()> {
    for n in ["die(y)", "die(y)", "y", "y"] {
        net.inject(n)?;
    }
    println!("{label}:");
    for r in net.trace(4) {
        println!("  step {} fired {:?} states {:?}", r.step, r.fired, r.states);
    }
    Ok(())
}

fn main() -> cma::error::Result<()> {
    run("knows of the death", ActivationNetwork::grief())?;
    run("does not know", ActivationNetwork::grief_unaware())
}
