//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//! Every check that compares against an independent computation carries its
//! own oracle below rather than calling back into the library.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cma::analysis::{cycle_occupancy, monte_carlo_occupancy, path_count_occupancy, stationary_distribution};
use cma::cluster::{
    bisimilar, canonical, classify, classify_cluster, cycle_length, default_horizon, prime_power_construction,
    product, simulate, wheel_cluster_cycle, ClusterNode, Family, ScaleSystem, TickPolicy,
};
use cma::fluents::{FluentStore, Mode, Threshold, TimePoint, TruthValue};
use cma::lingua::{disambiguate, parse, ActivationNetwork, Context, Grammar};
use cma::machine::{Automaton, AutomatonBuilder, Constraints, Rule};
use cma::memory::{build_t1, transition_table_size, Symbol, Tape};
use cma::menagerie::{annotate_outputs, chain, labeled_wheel, looped_two_wheel, state_name, wheel, MachineSpec};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, what: &str, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    f()?;
    let took = t.elapsed();
    ensure(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))
}

fn ratio(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(n.clone().into(), d.clone().into())
}

fn c1_golden_ratio() -> Check {
    // f_1 = f_2 = 1 by plain iteration.
    let mut fib = vec![BigUint::from(0u8), BigUint::from(1u8)];
    while fib.len() < 43 {
        let n = fib.len();
        let next = &fib[n - 1] + &fib[n - 2];
        fib.push(next);
    }
    timed(Duration::from_secs(1), "path counting", || {
        let m = looped_two_wheel();
        let v = path_count_occupancy(&m, 40).map_err(|e| e.to_string())?;
        let a = state_name(0);
        let exact = v.get_exact(&a).ok_or("no exact entry")?;
        ensure(*exact == ratio(&fib[41], &fib[42]), || format!("{exact} != f41/f42"))?;
        let x = v.get(&a).unwrap();
        ensure((x - 0.61803).abs() < 1e-3, || format!("a-entry {x}"))
    })
}

fn c2_stationary() -> Check {
    timed(Duration::from_secs(5), "stationary + sampling", || {
        let m = looped_two_wheel();
        let pi = stationary_distribution(&m).map_err(|e| e.to_string())?;
        let d = pi.max_deviation(&[2.0 / 3.0, 1.0 / 3.0]);
        ensure(d < 1e-9, || format!("stationary off by {d}"))?;
        let mc = monte_carlo_occupancy(&m, 1_000_000, 7).map_err(|e| e.to_string())?;
        let d = mc.max_deviation(&[2.0 / 3.0, 1.0 / 3.0]);
        ensure(d < 3e-3, || format!("sampled occupancy off by {d}"))
    })
}

fn c3_labeled_wheel() -> Check {
    let m = labeled_wheel(&["a", "b", "c"], &[5, 3, 2]).map_err(|e| e.to_string())?;
    let v = cycle_occupancy(&m).map_err(|e| e.to_string())?.by_signal(&m);
    for (label, n) in [("a", 5), ("b", 3), ("c", 2)] {
        let got = v.get_exact(label).ok_or_else(|| format!("no exact value for {label}"))?;
        let want = BigRational::new(n.into(), 10.into());
        ensure(*got == want, || format!("{label}: {got} != {want}"))?;
    }
    Ok(())
}

fn c4_coprime_union() -> Check {
    timed(Duration::from_secs(5), "cluster simulation", || {
        let node = ClusterNode::leaf(wheel(2), 1)
            .with_policy(TickPolicy::Union)
            .with_inner("q0", ClusterNode::leaf(wheel(3), 0))
            .and_then(|n| n.with_inner("q1", ClusterNode::leaf(wheel(5), 0)))
            .map_err(|e| e.to_string())?;
        let r = simulate(&node, 100_000, 1);
        for (l, x) in r.occupancy.labels.iter().zip(r.occupancy.to_f64()) {
            ensure((0.45..=0.55).contains(&x), || format!("{l} occupied {x}"))?;
        }
        Ok(())
    })
}

/// A wheel cluster stepped by hand: a leaf moves every tick, a host moves
/// once on any tick where one of its inner wheels moved onto a signal.
#[derive(Clone, PartialEq, Eq)]
struct HandWheel {
    len: usize,
    signals: BTreeSet<usize>,
    pos: usize,
    inner: Vec<HandWheel>,
}

impl HandWheel {
    fn tick(&mut self) -> bool {
        let drive = if self.inner.is_empty() {
            true
        } else {
            let mut any = false;
            for w in &mut self.inner {
                any |= w.tick();
            }
            any
        };
        if drive {
            self.pos = (self.pos + 1) % self.len;
            self.signals.contains(&self.pos)
        } else {
            false
        }
    }

    fn first_return(&self, limit: u64) -> Option<u64> {
        let mut w = self.clone();
        (1..=limit).find(|_| {
            w.tick();
            w == *self
        })
    }
}

fn random_cluster(rng: &mut ChaCha8Rng, depth: usize, scale: i32) -> (ClusterNode, HandWheel) {
    let len = rng.random_range(1..=if depth == 0 { 9 } else { 4 });
    let mut signals: BTreeSet<usize> = BTreeSet::from([len - 1]);
    for q in 0..len - 1 {
        if rng.random_bool(0.2) {
            signals.insert(q);
        }
    }
    let labels: Vec<(String, &str)> = (0..len)
        .map(|q| (state_name(q), if signals.contains(&q) { "1" } else { "" }))
        .collect();
    let refs: Vec<(&str, &str)> = labels.iter().map(|(s, o)| (s.as_str(), *o)).collect();
    let m = annotate_outputs(&wheel(len), &refs).unwrap();
    if depth == 0 {
        return (
            ClusterNode::leaf(m, 0),
            HandWheel {
                len,
                signals,
                pos: 0,
                inner: vec![],
            },
        );
    }
    let mut node = ClusterNode::leaf(m, scale).with_policy(TickPolicy::Union);
    let mut inner = Vec::new();
    let hosts = rng.random_range(1..=len.min(3));
    for q in 0..hosts {
        let sub = rng.random_range(0..depth);
        let (n, h) = random_cluster(rng, sub, scale - 1);
        node = node.with_inner(&state_name(q), n).unwrap();
        inner.push(h);
    }
    (
        node,
        HandWheel {
            len,
            signals,
            pos: 0,
            inner,
        },
    )
}

fn c5_cycle_lengths() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 20 {
        tries += 1;
        ensure(tries < 10_000, || "could not draw 20 small clusters".into())?;
        let (node, hand) = random_cluster(&mut rng, 3, 3);
        let analytic = cycle_length(&node).map_err(|e| e.to_string())?;
        let Some(v) = u64::try_from(&analytic.value).ok().filter(|&v| v <= 1_000_000) else {
            continue;
        };
        let brute = hand.first_return(1_000_000);
        ensure(brute == Some(v), || format!("analytic {v}, by hand {brute:?}"))?;
        checked += 1;
    }
    timed(Duration::from_secs(5), "prime-power cycle", || {
        let big = wheel_cluster_cycle(&prime_power_construction(10_000)).map_err(|e| e.to_string())?;
        ensure(big.digits > 4348 && !big.simulated, || format!("{} digits", big.digits))
    })
}

fn c6_taxonomy() -> Check {
    let mut classified: Vec<Automaton> = Vec::new();
    for k in 1..=100 {
        let c = classify(&wheel(k)).map_err(|e| e.to_string())?;
        ensure(c.to_string() == format!("C({k})"), || format!("S_{k} is {c}"))?;
        let l = classify(&chain(k)).map_err(|e| e.to_string())?;
        ensure(l.to_string() == format!("L({k})"), || format!("E_{k} is {l}"))?;
        classified.push(wheel(k));
        classified.push(chain(k));
    }
    for k in 2..=20 {
        let spec: MachineSpec = format!("chain:{k},loops={}", k - 1).parse().unwrap();
        classified.push(cma::menagerie::build(&spec).unwrap());
    }
    let s = ScaleSystem::modern();
    let h = default_horizon();
    let looped: MachineSpec = "chain:4,loops=3".parse().unwrap();
    let with_loop = product(&wheel(3), &cma::menagerie::build(&looped).unwrap(), 0, &s).map_err(|e| e.to_string())?;
    let c = classify_cluster(&with_loop, &h, 10_000).map_err(|e| e.to_string())?;
    ensure(c.family == Family::C, || format!("product with end loop is {c}"))?;
    let without = product(&wheel(3), &chain(4), 0, &s).map_err(|e| e.to_string())?;
    let c = classify_cluster(&without, &h, 10_000).map_err(|e| e.to_string())?;
    ensure(c.family == Family::L, || format!("product without loop is {c}"))?;
    ensure(!bisimilar(&wheel(4), &wheel(2)).bisimilar, || "S_4 ~ S_2".into())?;
    for m in &classified {
        let rep = canonical(&classify(m).unwrap()).map_err(|e| e.to_string())?;
        ensure(bisimilar(m, &rep).bisimilar, || format!("{} not bisimilar to {}", m.name(), rep.name()))?;
    }
    Ok(())
}

/// A flat bit array and an integer head under the tape's rules.
struct ArrayTape {
    bits: Vec<bool>,
    head: usize,
}

impl ArrayTape {
    fn apply(&mut self, s: Symbol) -> (bool, bool) {
        let mut boundary = false;
        match s {
            Symbol::Tick => {
                if self.head > 0 {
                    self.head &= !(1 << (usize::BITS - 1 - self.head.leading_zeros()));
                }
            }
            Symbol::Mu if self.head == 0 => boundary = true,
            Symbol::Mu => self.head -= 1,
            Symbol::Nu if self.head + 1 == self.bits.len() => boundary = true,
            Symbol::Nu => self.head += 1,
            Symbol::Alpha => self.bits[self.head] = true,
            Symbol::Omega => self.bits[self.head] = false,
        }
        (self.bits[self.head], boundary)
    }
}

fn random_symbol(rng: &mut ChaCha8Rng) -> Symbol {
    // Weighted towards head moves so long scripts reach the far end.
    match rng.random_range(0..10) {
        0..=3 => Symbol::Nu,
        4..=5 => Symbol::Mu,
        6 => Symbol::Alpha,
        7 => Symbol::Omega,
        _ => Symbol::Tick,
    }
}

fn c7_memory() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for run in 0..1000 {
        let len = rng.random_range(0..=10_000);
        let mut tape = build_t1();
        let mut oracle = ArrayTape {
            bits: vec![false; tape.len()],
            head: 0,
        };
        for step in 0..len {
            let s = random_symbol(&mut rng);
            let e = tape.apply_mut(s);
            let want = oracle.apply(s);
            ensure((e.bit, e.boundary) == want, || format!("run {run} step {step}: emission differs"))?;
        }
        ensure(tape.content() == oracle.bits && tape.head() == oracle.head, || {
            format!("run {run}: final tape differs")
        })?;
        ensure(tape.replicas_agree(), || format!("run {run}: replicas diverged"))?;
    }

    let mut tape = build_t1();
    for _ in 0..3000 {
        tape.apply_mut(random_symbol(&mut rng));
    }
    let stored = tape.content();
    let mut idle = tape.clone();
    for _ in 0..10_000 {
        idle.apply_mut(Symbol::Tick);
    }
    ensure(idle.content() == stored, || "content lost while idling".into())?;

    for start in 0..256 {
        let mut t = build_t1();
        for _ in 0..start {
            t.apply_mut(Symbol::Nu);
        }
        let ticks = (1..=8).find(|_| {
            t.apply_mut(Symbol::Tick);
            t.head() == 0
        });
        ensure(start == 0 || ticks.is_some(), || format!("head {start} still away after 8 ticks"))?;
    }

    for r in 0..3 {
        for (pos, &want) in stored.iter().enumerate() {
            let mut hit = tape.clone();
            hit.corrupt(r, pos).map_err(|e| e.to_string())?;
            let got = hit.majority_read(pos).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("fault at {r}:{pos} not corrected"))?;
        }
    }
    ensure(Tape::new(256, 1, 1).unwrap().majority_read(0).is_err(), || "single replica voted".into())?;
    let cells = transition_table_size(256, 8, 5);
    ensure(cells == 10_240, || format!("table has {cells} cells"))
}

fn c8_fluents() -> Check {
    let th = Threshold::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let domain = (0i64, 100_000i64);
    let mut store = FluentStore::new(0, ScaleSystem::modern()).map_err(|e| e.to_string())?;
    let mut at = 0;
    let mut ranges = Vec::new();
    while at < domain.1 {
        let run = rng.random_range(1..400);
        if rng.random_bool(0.5) {
            ranges.push((at, at + run));
        }
        at += run;
    }
    let complement: Vec<(i64, i64)> = {
        let mut out = Vec::new();
        let mut from = 0;
        for &(a, b) in &ranges {
            if a > from {
                out.push((from, a));
            }
            from = b;
        }
        out.push((from, domain.1));
        out
    };
    store.assign_ranges("p", domain, &ranges).map_err(|e| e.to_string())?;
    store.assign_ranges("not_p", domain, &complement).map_err(|e| e.to_string())?;
    let eval = |f: &str, t: TimePoint, m: Mode, th: Threshold| store.eval(f, t, m, th).unwrap();
    for _ in 0..10_000 {
        let scale = rng.random_range(1..=3);
        let index = rng.random_range(0..domain.1 / 10i64.pow(scale as u32));
        let t = TimePoint::new(scale, index);
        let [all, prep, some] = [Mode::Forall, Mode::Preponderant, Mode::Exists].map(|m| eval("p", t, m, th));
        let implies = |a: TruthValue, b: TruthValue| a != TruthValue::True || b == TruthValue::True;
        ensure(implies(all, prep) && implies(prep, some), || format!("{t}: {all} {prep} {some}"))?;
        let theta = Threshold::new(rng.random_range(51..=100), 100).unwrap();
        let both = eval("p", t, Mode::Preponderant, theta) == TruthValue::True
            && eval("not_p", t, Mode::Preponderant, theta) == TruthValue::True;
        ensure(!both, || format!("{t}: p and not p both preponderant"))?;
    }

    let mut split = FluentStore::new(0, ScaleSystem::modern()).unwrap();
    split.assign_ranges("p", (0, 1000), &[(0, 501)]).unwrap();
    let v = split.eval("p", TimePoint::new(3, 0), Mode::Preponderant, th).unwrap();
    ensure(v == TruthValue::Undefined, || format!("50.1% split is {v}"))?;

    let mut days = FluentStore::new(2, ScaleSystem::naive()).unwrap();
    days.cyclic_fluent("Day", 2, (0, 1), Some("Night")).unwrap();
    for f in ["Day", "Night"] {
        let v = days.eval(f, TimePoint::new(3, 4), Mode::Preponderant, th).unwrap();
        ensure(v == TruthValue::Undefined, || format!("{f} one scale up is {v}"))?;
    }
    Ok(())
}

fn c9_parser() -> Check {
    let g = Grammar::demo();
    let r = parse("Eleanor broke the record", &g).map_err(|e| e.to_string())?;
    let trees: Vec<_> = r.full.iter().filter(|t| t.category == "S").collect();
    ensure(trees.len() == 1, || format!("{} S trees", trees.len()))?;
    let record = |t: &cma::lingua::ParseItem| {
        t.walk()
            .into_iter()
            .find(|i| i.word.as_deref() == Some("record"))
            .map(|i| i.senses.clone())
            .unwrap_or_default()
    };
    let senses = record(trees[0]);
    ensure(senses.len() == 3, || format!("record keeps {senses:?}"))?;
    let ctx: Context = vec![("Eleanor".into(), "athlete".into())];
    let narrowed = disambiguate(trees[0], &ctx, &g.rules).map_err(|e| e.to_string())?;
    let kept = record(&narrowed);
    ensure(kept == BTreeSet::from(["record3".to_string()]), || format!("athlete context keeps {kept:?}"))?;
    for item in r.items().into_iter().chain(r.built.iter().flat_map(|b| b.walk())) {
        if item.word.as_deref() == Some("record") {
            ensure(item.category == "N", || format!("record used as {}", item.category))?;
        }
    }

    let mut grief = ActivationNetwork::grief();
    for n in ["die(y)", "die(y)", "y", "y"] {
        grief.inject(n).unwrap();
    }
    let fired_double = grief.trace(4).iter().any(|s| s.fired.iter().any(|f| f == "grief(x)"));
    ensure(fired_double, || "grief never fired with both sources".into())?;
    let mut unaware = ActivationNetwork::grief_unaware();
    for n in ["die(y)", "die(y)", "y", "y"] {
        unaware.inject(n).unwrap();
    }
    let fired_single = unaware.trace(10).iter().any(|s| s.fired.iter().any(|f| f == "grief(x)"));
    ensure(!fired_single, || "grief fired from one source".into())?;
    for source in ["die(y)", "y"] {
        let mut net = ActivationNetwork::grief();
        net.inject(source).unwrap();
        net.inject(source).unwrap();
        let fired = net.trace(10).iter().any(|s| s.fired.iter().any(|f| f == "grief(x)"));
        ensure(!fired, || format!("grief fired from {source} alone"))?;
    }
    Ok(())
}

fn rules_of(a: &Automaton) -> BTreeSet<Rule> {
    a.validate(&Constraints::default()).into_iter().map(|v| v.rule).collect()
}

fn star(n: usize, fan_in: bool) -> Automaton {
    let mut b = AutomatonBuilder::new("star").states((0..n).map(state_name)).initial(state_name(0));
    b = b.input("e");
    for q in 1..n {
        b = if fan_in {
            b.edge(state_name(q), "e", state_name(0))
        } else {
            b.edge(state_name(0), "e", state_name(q))
        };
    }
    b.build().unwrap()
}

fn c10_constraints() -> Check {
    let cases: Vec<(&str, Automaton, Automaton, Rule)> = vec![
        ("states", chain(10_000), {
            let b = AutomatonBuilder::new("big").states((0..10_001).map(state_name)).initial(state_name(0));
            b.input("e").build().unwrap()
        }, Rule::Ss),
        ("alphabet", {
            AutomatonBuilder::new("a256").state("q0").initial("q0").inputs((0..256).map(|i| format!("x{i}"))).build().unwrap()
        }, {
            AutomatonBuilder::new("a257").state("q0").initial("q0").inputs((0..257).map(|i| format!("x{i}"))).build().unwrap()
        }, Rule::Io),
        ("out-degree", star(8, false), star(9, false), Rule::Od),
        ("in-degree", star(10_000, true), star(10_001, true), Rule::Id),
    ];
    for (what, below, at, rule) in cases {
        ensure(!rules_of(&below).contains(&rule), || format!("{what}: flagged below the limit"))?;
        ensure(rules_of(&at).contains(&rule), || format!("{what}: not flagged at the limit"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("path-count occupancy of the looped 2-wheel", c1_golden_ratio),
        ("stationary and sampled occupancy", c2_stationary),
        ("labeled wheel signal shares", c3_labeled_wheel),
        ("coprime union cluster balance", c4_coprime_union),
        ("cycle lengths and the prime-power construction", c5_cycle_lengths),
        ("temporal taxonomy and bisimulation", c6_taxonomy),
        ("tape memory", c7_memory),
        ("fluent modes", c8_fluents),
        ("island parser and activation", c9_parser),
        ("structural limits", c10_constraints),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
