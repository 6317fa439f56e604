//! Parses the demo sentence, keeps every sense of the ambiguous noun and
//! narrows it with what is known about the subject.

use cma::lingua::{disambiguate, parse, Grammar};

fn main() -> cma::error::Result<()> {
    let g = Grammar::demo();
    let r = parse("Eleanor broke the record", &g)?;
    let tree = &r.full[0];
    println!("{tree}");
    for property in ["athlete", "hacker", "clumsy"] {
        let ctx = vec![("Eleanor".to_string(), property.to_string())];
        println!("{property:<8} {}", disambiguate(tree, &ctx, &g.rules)?);
    }

    let island = parse("the record", &g)?;
    println!("fragment: {}", island.islands[0]);
    if let Err(e) = parse("Eleanor broke the vase", &g) {
        println!("unknown word: {e}");
    }
    Ok(())
}
