//! The temporal taxonomy on a handful of machines and cluster products.

use cma::cluster::{classify, classify_cluster, classify_with, default_horizon, product, Openness, ScaleSystem};
use cma::menagerie::{build, chain, wheel, MachineSpec};

fn main() -> cma::error::Result<()> {
    for text in ["wheel:7", "chain:5", "chain:4,loops=3", "wheel:1"] {
        let m = build(&text.parse::<MachineSpec>()?)?;
        let c = classify(&m)?;
        println!("{text:<16} {c:<6} absorbing={} lead_in={}", c.absorbing, c.lead_in);
    }

    if let Err(e) = classify(&build(&"wire:01".parse()?)?) {
        println!("wire:01          {e}");
    }

    let short = num_bigint::BigUint::from(100u32);
    println!("wheel:7 with horizon 100: {}", classify_with(&wheel(7), &short, Openness::default())?);
    println!("chain:1000 with horizon 100: {}", classify_with(&chain(1000), &short, Openness::default())?);
    let open = Openness { open_start: true, open_end: true };
    println!("chain:3 declared open at both ends: {}", classify_with(&chain(3), &default_horizon(), open)?);

    let s = ScaleSystem::modern();
    let looped = build(&"chain:4,loops=3".parse()?)?;
    let c = classify_cluster(&product(&wheel(3), &looped, 0, &s)?, &default_horizon(), 10_000)?;
    println!("S3 x E4 with end loop: {c}");
    let l = classify_cluster(&product(&wheel(3), &chain(4), 0, &s)?, &default_horizon(), 10_000)?;
    println!("S3 x E4: {l}");
    Ok(())
}
