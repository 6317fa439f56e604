//! Writes a byte pattern into the replicated 256-bit tape, lets it idle,
//! flips a stored bit in one replica and reads it back by majority.

use cma::memory::{build_t1, transition_table_size, Symbol};

fn main() -> cma::error::Result<()> {
    let mut tape = build_t1();
    for (pos, bit) in [(0, true), (3, true), (9, true), (200, true)] {
        while tape.head() < pos {
            tape.apply_mut(Symbol::Nu);
        }
        tape.apply_mut(if bit { Symbol::Alpha } else { Symbol::Omega });
    }
    println!("after writing: head {} content {}", tape.head(), tape.to_hex());

    let mut ticks = 0;
    while tape.head() != 0 {
        tape.apply_mut(Symbol::Tick);
        ticks += 1;
    }
    println!("head back at 0 after {ticks} idle ticks");
    let rested = tape.idle(10_000);
    println!("content unchanged after a myriad idle ticks: {}", rested.content() == tape.content());

    tape.corrupt(1, 9)?;
    println!("replicas agree after a fault: {}", tape.replicas_agree());
    println!("majority read of bit 9: {}", tape.majority_read(9)?);
    println!("transition table of one cell: {} entries", transition_table_size(256, 8, 5));
    Ok(())
}
