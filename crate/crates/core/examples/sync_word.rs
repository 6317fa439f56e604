//! Searches reset words. A wire forgets everything on any symbol; a
//! three-state machine in the style of Černý needs a longer word.

use cma::analysis::synchronizing_word;
use cma::machine::AutomatonBuilder;
use cma::menagerie::{build, MachineSpec};

fn main() -> cma::error::Result<()> {
    let wire = build(&"wire:01".parse::<MachineSpec>()?)?;
    println!("wire: {:?}", synchronizing_word(&wire)?.map(|w| w.word));

    let mut b = AutomatonBuilder::new("cerny3").states(["c0", "c1", "c2"]).initial("c0").inputs(["a", "b"]);
    for (from, a, bb) in [("c0", "c1", "c1"), ("c1", "c2", "c1"), ("c2", "c0", "c2")] {
        b = b.edge(from, "a", a).edge(from, "b", bb);
    }
    let c = b.build()?;
    match synchronizing_word(&c)? {
        Some(w) => println!("cerny3: {} -> {} (shortest: {})", w.word.join(" "), w.target, w.shortest),
        None => println!("cerny3 does not synchronize"),
    }
    Ok(())
}
