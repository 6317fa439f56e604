//! Day and night on the naive scales, evaluated one and two scales up in
//! each mode, plus a nearly even split.

use cma::cluster::ScaleSystem;
use cma::fluents::{FluentStore, Mode, Threshold, TimePoint};

fn main() -> cma::error::Result<()> {
    let th = Threshold::default();
    let mut store = FluentStore::new(1, ScaleSystem::naive())?;
    // 96 quarter-hours a day, light from 06:00 to 18:00.
    store.cyclic_fluent("Day", 96, (24, 72), Some("Night"))?;
    store.assign_ranges("awake", (0, 96), &[(28, 92)])?;
    for (f, at) in [("Day", "2.0"), ("awake", "2.0"), ("Day", "1.30"), ("Night", "3.0")] {
        let t: TimePoint = at.parse()?;
        let vals: Vec<String> = [Mode::Forall, Mode::Preponderant, Mode::Exists]
            .iter()
            .map(|&m| store.eval(f, t, m, th).map(|v| v.to_string()))
            .collect::<Result<_, _>>()?;
        println!("{f:<6} at {at:<5} forall/preponderant/exists = {}", vals.join("/"));
    }

    let mut split = FluentStore::new(0, ScaleSystem::modern())?;
    split.assign_ranges("p", (0, 1000), &[(0, 501)])?;
    let v = split.eval("p", TimePoint::new(3, 0), Mode::Preponderant, th)?;
    println!("501 of 1000 units true: {v}");
    Ok(())
}
