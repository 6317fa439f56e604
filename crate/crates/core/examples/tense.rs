use cma::cluster::{ScaleSystem, NAIVE_SCALE_NAMES};
use cma::lingua::{tense_locate, TenseMap};

fn scale_name(i: i32) -> &'static str {
    NAIVE_SCALE_NAMES.iter().find(|(s, _)| *s == i).map_or("?", |(_, n)| n)
}

fn main() -> cma::error::Result<()> {
    for map in [TenseMap::tamil_past(), TenseMap::future(), TenseMap::tagalog_past()] {
        map.check(&ScaleSystem::naive())?;
        println!("{}:", map.name);
        for label in map.tenses.keys() {
            let t = tense_locate(label, &map, 1)?;
            println!("  {label:<13} {t:<6} one {} away", scale_name(t.scale));
        }
    }
    Ok(())
}
