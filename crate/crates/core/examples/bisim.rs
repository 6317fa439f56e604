use cma::cluster::{bisimilar, canonical, classify, quotient};
use cma::menagerie::{annotate_outputs, wheel};

fn main() -> cma::error::Result<()> {
    let b = bisimilar(&wheel(4), &wheel(2));
    println!("S4 ~ S2: {}", b.bisimilar);

    // Signals on every other state make a 4-wheel behave like a 2-wheel.
    let doubled = annotate_outputs(&wheel(4), &[("q1", "1"), ("q3", "1")])?;
    println!("S4 signalling at q1, q3 ~ S2: {}", bisimilar(&doubled, &wheel(2)).bisimilar);
    let q = quotient(&doubled)?;
    println!("its quotient has {} states", q.num_states());

    let c = classify(&wheel(9))?;
    println!("S9 ~ canonical {}: {}", c, bisimilar(&wheel(9), &canonical(&c)?).bisimilar);
    Ok(())
}
