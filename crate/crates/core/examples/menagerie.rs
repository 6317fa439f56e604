//! Builds the stock machines from their compact specs and prints each one's
//! size and output alphabet, then the DOT form of the synapse.

use cma::menagerie::{build, MachineSpec};

fn main() -> cma::error::Result<()> {
    for text in ["wheel:4", "wheel:2,loops=a", "chain:3", "synapse:rab", "wire:01", "akt:activity", "schema:exchange"] {
        let spec: MachineSpec = text.parse()?;
        let m = build(&spec)?;
        let outs: Vec<&str> = m.output_alphabet().into_iter().collect();
        println!(
            "{text:<18} {:<14} {:>2} states {:>2} edges  outputs {outs:?}",
            m.name(),
            m.num_states(),
            m.num_edges()
        );
    }
    println!("\n{}", build(&"synapse:rab".parse()?)?.to_dot());
    Ok(())
}
