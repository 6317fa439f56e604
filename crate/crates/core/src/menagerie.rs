//! Constructors for the named machines: wheels, chains, the abstract synapse,
//! wires, the lexical-aspect shapes and the two schema machines.
//!
//! Wheel states are named `q0 .. q{k-1}` with `q0` initial and the last
//! state signaling `1`, so `S_k` emits once every `k` ticks counting from
//! the initial state.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::machine::{Automaton, AutomatonBuilder, Constraints, TICK};

/// The impulse symbol the synapse listens to.
pub const IMPULSE: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineSpec {
    /// `S_k`, with self-loops on the listed state indices.
    Wheel { size: usize, loops: Vec<usize> },
    /// `E_k`: the wheel without its closing transition.
    Chain { size: usize, loops: Vec<usize> },
    Synapse(SynapseOptions),
    Wire { symbols: Vec<String> },
    Aktionsart(Aktionsart),
    Schema(SchemaKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynapseOptions {
    pub loops: BTreeSet<SynapseState>,
    /// Adds a tick-driven `r -> a` edge. Off unless asked for.
    pub spontaneous_arousal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SynapseState {
    Rest,
    Aroused,
    Transmit,
    Blocked,
}

impl SynapseState {
    pub fn letter(self) -> char {
        match self {
            SynapseState::Rest => 'r',
            SynapseState::Aroused => 'a',
            SynapseState::Transmit => 't',
            SynapseState::Blocked => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'r' => SynapseState::Rest,
            'a' => SynapseState::Aroused,
            't' => SynapseState::Transmit,
            'b' => SynapseState::Blocked,
            _ => return None,
        })
    }
}

impl fmt::Display for SynapseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Vendler classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aktionsart {
    State,
    Semelfactive,
    Achievement,
    Accomplishment,
    Activity,
}

impl Aktionsart {
    pub const ALL: [Aktionsart; 5] = [
        Aktionsart::State,
        Aktionsart::Semelfactive,
        Aktionsart::Achievement,
        Aktionsart::Accomplishment,
        Aktionsart::Activity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aktionsart::State => "state",
            Aktionsart::Semelfactive => "semelfactive",
            Aktionsart::Achievement => "achievement",
            Aktionsart::Accomplishment => "accomplishment",
            Aktionsart::Activity => "activity",
        }
    }
}

impl FromStr for Aktionsart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Aktionsart::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec {
                spec: s.to_string(),
                reason: "unknown aktionsart class".into(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    Exchange,
    Gravity,
}

impl SchemaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemaKind::Exchange => "exchange",
            SchemaKind::Gravity => "gravity",
        }
    }
}

impl FromStr for SchemaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exchange" => Ok(SchemaKind::Exchange),
            "gravity" => Ok(SchemaKind::Gravity),
            _ => Err(Error::InvalidSpec {
                spec: s.to_string(),
                reason: "unknown schema".into(),
            }),
        }
    }
}

/// A fluent value attached to a schema state. These are metadata for the
/// fluents module, not Moore outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FluentAnnotation {
    pub state: String,
    pub fluent: String,
    pub holds: bool,
}

/// A schema machine together with its fluent annotations.
#[derive(Debug, Clone)]
pub struct Schema {
    pub kind: SchemaKind,
    pub machine: Automaton,
    pub annotations: Vec<FluentAnnotation>,
}

impl Schema {
    /// Every fluent mentioned by some annotation, sorted.
    pub fn fluents(&self) -> BTreeSet<&str> {
        self.annotations.iter().map(|a| a.fluent.as_str()).collect()
    }
}

pub fn build(spec: &MachineSpec) -> Result<Automaton> {
    build_with(spec, &Constraints::default())
}

pub fn build_with(spec: &MachineSpec, c: &Constraints) -> Result<Automaton> {
    let machine = match spec {
        MachineSpec::Wheel { size, loops } => cycle(*size, loops, true, c)?,
        MachineSpec::Chain { size, loops } => cycle(*size, loops, false, c)?,
        MachineSpec::Synapse(opts) => synapse(opts)?,
        MachineSpec::Wire { symbols } => wire(symbols, c)?,
        MachineSpec::Aktionsart(k) => aktionsart(*k)?,
        MachineSpec::Schema(k) => schema(*k)?.machine,
    };
    let report = machine.validate(c);
    if let Some(v) = report.first() {
        return Err(Error::Constraint(v.to_string()));
    }
    Ok(machine)
}

/// `S_k` without loops.
pub fn wheel(k: usize) -> Automaton {
    cycle(k, &[], true, &Constraints::default()).expect("wheel size within default limits")
}

/// `E_k` without loops.
pub fn chain(k: usize) -> Automaton {
    cycle(k, &[], false, &Constraints::default()).expect("chain size within default limits")
}

/// The looped 2-wheel `S_2^1`: loop on the initial silent state, `1` on the other.
pub fn looped_two_wheel() -> Automaton {
    cycle(2, &[0], true, &Constraints::default()).expect("fixed machine")
}

pub fn state_name(i: usize) -> String {
    format!("q{i}")
}

fn cycle(k: usize, loops: &[usize], closed: bool, c: &Constraints) -> Result<Automaton> {
    let kind = if closed { "wheel" } else { "chain" };
    if k == 0 {
        return Err(Error::InvalidSpec {
            spec: format!("{kind}:0"),
            reason: "size must be at least 1".into(),
        });
    }
    if k > c.max_states {
        return Err(Error::Constraint(format!(
            "ss: {kind} of {k} states exceeds the limit of {}",
            c.max_states
        )));
    }
    if let Some(&bad) = loops.iter().find(|&&i| i >= k) {
        return Err(Error::InvalidSpec {
            spec: format!("{kind}:{k}"),
            reason: format!("loop position {bad} outside the {k} states"),
        });
    }
    let loop_set: BTreeSet<usize> = loops.iter().copied().collect();
    let name = match (closed, loop_set.len()) {
        (true, 0) => format!("S_{k}"),
        (true, i) => format!("S_{k}^{i}"),
        (false, 0) => format!("E_{k}"),
        (false, i) => format!("E_{k}^{i}"),
    };
    let mut b = AutomatonBuilder::new(name)
        .states((0..k).map(state_name))
        .input(TICK)
        .initial(state_name(0))
        .output(state_name(k - 1), "1");
    for i in 0..k {
        if loop_set.contains(&i) {
            b = b.edge(state_name(i), TICK, state_name(i));
        }
        if i + 1 < k {
            b = b.edge(state_name(i), TICK, state_name(i + 1));
        } else if closed {
            b = b.edge(state_name(i), TICK, state_name(0));
        }
    }
    b.build()
}

/// The abstract synapse: `r -1-> a -1-> t -e-> b -e-> r`, output `1` on
/// entering `t`, optional tick self-loops on `r`, `a` and `b` (never `t`).
fn synapse(opts: &SynapseOptions) -> Result<Automaton> {
    if opts.loops.contains(&SynapseState::Transmit) {
        return Err(Error::InvalidSpec {
            spec: "synapse".into(),
            reason: "the transmitting state cannot carry a loop".into(),
        });
    }
    let name = |s: SynapseState| s.letter().to_string();
    let mut b = AutomatonBuilder::new("R")
        .states(["r", "a", "t", "b"])
        .inputs([IMPULSE, TICK])
        .initial("r")
        .output("t", "1")
        .edge("r", IMPULSE, "a")
        .edge("a", IMPULSE, "t")
        .edge("t", TICK, "b")
        .edge("b", TICK, "r");
    for &s in &opts.loops {
        b = b.edge(name(s), TICK, name(s));
    }
    if opts.spontaneous_arousal {
        b = b.edge("r", TICK, "a");
    }
    b.build()
}

/// Name of the wire state that relays `symbol`.
pub fn wire_state(symbol: &str) -> String {
    format!("w:{symbol}")
}

fn wire(symbols: &[String], c: &Constraints) -> Result<Automaton> {
    if symbols.is_empty() {
        return Err(Error::InvalidSpec {
            spec: "wire".into(),
            reason: "needs at least one symbol".into(),
        });
    }
    if symbols.len() > c.max_alphabet {
        return Err(Error::Constraint(format!(
            "io: wire over {} symbols exceeds the limit of {}",
            symbols.len(),
            c.max_alphabet
        )));
    }
    let mut b = AutomatonBuilder::new("D")
        .state("rest")
        .states(symbols.iter().map(|s| wire_state(s)))
        .inputs(symbols.iter().cloned())
        .initial("rest");
    for s in symbols {
        b = b.output(wire_state(s), s.clone());
    }
    let all: Vec<String> = std::iter::once("rest".to_string())
        .chain(symbols.iter().map(|s| wire_state(s)))
        .collect();
    for from in &all {
        for s in symbols {
            b = b.edge(from.clone(), s.clone(), wire_state(s));
        }
    }
    b.build()
}

fn aktionsart(kind: Aktionsart) -> Result<Automaton> {
    let c = Constraints::default();
    let m = match kind {
        Aktionsart::State => cycle(1, &[], true, &c)?,
        Aktionsart::Semelfactive => cycle(1, &[], false, &c)?,
        Aktionsart::Achievement => cycle(2, &[], false, &c)?,
        Aktionsart::Accomplishment => cycle(2, &[0], false, &c)?,
        Aktionsart::Activity => cycle(2, &[0, 1], false, &c)?,
    };
    Ok(m.renamed(format!("akt:{}", kind.as_str())))
}

/// Builds a schema machine with its fluent annotations.
pub fn schema(kind: SchemaKind) -> Result<Schema> {
    let ann = |state: &str, fluent: &str, holds: bool| FluentAnnotation {
        state: state.into(),
        fluent: fluent.into(),
        holds,
    };
    Ok(match kind {
        SchemaKind::Exchange => {
            let machine = AutomatonBuilder::new("Exchange")
                .states(["b", "mid", "a"])
                .input(TICK)
                .initial("b")
                .edge("b", TICK, "mid")
                .edge("mid", TICK, "a")
                .build()?;
            let mut annotations = Vec::new();
            for (fluent, before) in [
                ("has(seller,goods)", true),
                ("has(buyer,money)", true),
                ("has(seller,money)", false),
                ("has(buyer,goods)", false),
            ] {
                annotations.push(ann("b", fluent, before));
                annotations.push(ann("a", fluent, !before));
            }
            Schema {
                kind,
                machine,
                annotations,
            }
        }
        SchemaKind::Gravity => {
            let machine = AutomatonBuilder::new("Gravity")
                .states(["rest", "falling"])
                .input(TICK)
                .initial("rest")
                .edge("rest", TICK, "falling")
                .edge("falling", TICK, "rest")
                .build()?;
            let annotations = vec![
                ann("rest", "supported", true),
                ann("rest", "falling", false),
                ann("falling", "supported", false),
                ann("falling", "falling", true),
            ];
            Schema {
                kind,
                machine,
                annotations,
            }
        }
    })
}

/// Returns a copy of `a` with the given outputs attached.
pub fn annotate_outputs(a: &Automaton, labels: &[(&str, &str)]) -> Result<Automaton> {
    a.with_outputs(labels.iter().copied())
}

/// `S_k` with consecutive blocks of states labeled by the given signals:
/// the first `counts[0]` states get `signals[0]` and so on.
pub fn labeled_wheel(signals: &[&str], counts: &[usize]) -> Result<Automaton> {
    if signals.len() != counts.len() {
        return Err(Error::Invalid("one count per signal is required".into()));
    }
    let k: usize = counts.iter().sum();
    let base = build(&MachineSpec::Wheel {
        size: k,
        loops: vec![],
    })?;
    let mut labels = Vec::with_capacity(k);
    let mut i = 0;
    for (sig, &n) in signals.iter().zip(counts) {
        for _ in 0..n {
            labels.push((state_name(i), sig.to_string()));
            i += 1;
        }
    }
    let m = base.with_outputs(labels.iter().map(|(q, s)| (q.as_str(), s.as_str())))?;
    Ok(m.renamed(format!("S_{k}[{}]", counts
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(","))))
}

fn parse_positions(spec: &str, value: &str) -> Result<Vec<usize>> {
    let bad = |reason: &str| Error::InvalidSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let mut out = Vec::new();
    for item in value.split('+').filter(|s| !s.is_empty()) {
        if let Ok(n) = item.parse::<usize>() {
            out.push(n);
        } else if let Some(n) = item.strip_prefix('q').and_then(|r| r.parse::<usize>().ok()) {
            out.push(n);
        } else if item.chars().all(|c| c.is_ascii_lowercase()) {
            out.extend(item.chars().map(|c| (c as u8 - b'a') as usize));
        } else {
            return Err(bad("loop positions are letters (a = first state), indices or q<n>"));
        }
    }
    Ok(out)
}

impl FromStr for MachineSpec {
    type Err = Error;

    /// Compact forms: `wheel:4`, `wheel:2,loops=a`, `chain:3`, `synapse:rab`,
    /// `synapse:-`, `synapse:r,spontaneous`, `wire:01`, `akt:activity`,
    /// `schema:exchange`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:params"))?;
        let mut parts = rest.split(',');
        let head = parts.next().unwrap_or_default();
        let options: Vec<(&str, &str)> = parts
            .map(|p| p.split_once('=').unwrap_or((p, "")))
            .collect();
        match kind {
            "wheel" | "chain" => {
                let size = head.parse::<usize>().map_err(|_| bad("size must be an integer"))?;
                let mut loops = Vec::new();
                for (k, v) in options {
                    match k {
                        "loops" => loops = parse_positions(s, v)?,
                        _ => return Err(bad("unknown option")),
                    }
                }
                Ok(if kind == "wheel" {
                    MachineSpec::Wheel { size, loops }
                } else {
                    MachineSpec::Chain { size, loops }
                })
            }
            "synapse" => {
                let mut opts = SynapseOptions::default();
                if head != "-" {
                    for c in head.chars() {
                        let st = SynapseState::from_letter(c)
                            .filter(|st| *st != SynapseState::Transmit)
                            .ok_or_else(|| bad("synapse loops are drawn from r, a, b"))?;
                        opts.loops.insert(st);
                    }
                }
                for (k, _) in options {
                    match k {
                        "spontaneous" => opts.spontaneous_arousal = true,
                        _ => return Err(bad("unknown option")),
                    }
                }
                Ok(MachineSpec::Synapse(opts))
            }
            "wire" => {
                if !options.is_empty() {
                    return Err(bad("wire takes no options"));
                }
                let symbols: Vec<String> = head.chars().map(|c| c.to_string()).collect();
                let unique: BTreeSet<&String> = symbols.iter().collect();
                if unique.len() != symbols.len() {
                    return Err(bad("duplicate wire symbol"));
                }
                Ok(MachineSpec::Wire { symbols })
            }
            "akt" => Ok(MachineSpec::Aktionsart(head.parse()?)),
            "schema" => Ok(MachineSpec::Schema(head.parse()?)),
            _ => Err(bad("unknown machine kind")),
        }
    }
}

impl fmt::Display for MachineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loops = |l: &[usize]| {
            l.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("+")
        };
        match self {
            MachineSpec::Wheel { size, loops: l } if l.is_empty() => write!(f, "wheel:{size}"),
            MachineSpec::Wheel { size, loops: l } => write!(f, "wheel:{size},loops={}", loops(l)),
            MachineSpec::Chain { size, loops: l } if l.is_empty() => write!(f, "chain:{size}"),
            MachineSpec::Chain { size, loops: l } => write!(f, "chain:{size},loops={}", loops(l)),
            MachineSpec::Synapse(o) => {
                let letters: String = o.loops.iter().map(|s| s.letter()).collect();
                write!(f, "synapse:{}", if letters.is_empty() { "-".into() } else { letters })?;
                if o.spontaneous_arousal {
                    write!(f, ",spontaneous")?;
                }
                Ok(())
            }
            MachineSpec::Wire { symbols } => write!(f, "wire:{}", symbols.concat()),
            MachineSpec::Aktionsart(k) => write!(f, "akt:{}", k.as_str()),
            MachineSpec::Schema(k) => write!(f, "schema:{}", k.as_str()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Chooser, StateId};

    fn spec(s: &str) -> Automaton {
        build(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn looped_two_wheel_matrix() {
        let m = spec("wheel:2,loops=a");
        assert_eq!(m.transition_matrix(TICK).unwrap(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(m, looped_two_wheel());
        assert!(m.is_signaling(StateId(1)));
        assert!(!m.is_signaling(StateId(0)));
    }

    #[test]
    fn achievement_is_a_bare_two_chain() {
        let m = spec("akt:achievement");
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_edges(), 1);
        assert!(m.edges().all(|(p, _, q)| p != q));
    }

    #[test]
    fn aktionsart_shapes() {
        let loops = |m: &Automaton| m.edges().filter(|(p, _, q)| p == q).count();
        let state = spec("akt:state");
        assert_eq!((state.num_states(), loops(&state)), (1, 1));
        let sem = spec("akt:semelfactive");
        assert_eq!((sem.num_states(), sem.num_edges()), (1, 0));
        let acc = spec("akt:accomplishment");
        assert_eq!((acc.num_states(), loops(&acc)), (2, 1));
        assert_eq!(acc.successor_count(StateId(0), 0), 2);
        let act = spec("akt:activity");
        assert_eq!((act.num_states(), loops(&act)), (2, 2));
    }

    #[test]
    fn wire_enumeration() {
        let m = spec("wire:01μν");
        assert_eq!(m.num_states(), 5);
        for q in m.state_ids() {
            assert_eq!(m.out_degree(q), 4);
            for sym in ["0", "1", "μ", "ν"] {
                let succ = m.step(q, sym).unwrap();
                assert_eq!(succ.len(), 1);
                assert_eq!(m.state_name(succ[0].0), wire_state(sym));
                // The relay for `0` is indistinguishable from silence.
                let expected = if sym == "0" { "" } else { sym };
                assert_eq!(succ[0].1, expected);
            }
        }
    }

    #[test]
    fn synapse_full_loops_edge_count() {
        let m = spec("synapse:rab");
        assert_eq!(m.num_states(), 4);
        let pairs: BTreeSet<(StateId, StateId)> = m.edges().map(|(p, _, q)| (p, q)).collect();
        assert_eq!(pairs.len(), 7);
        let t = m.state_id("t").unwrap();
        assert!(!pairs.contains(&(t, t)));
        assert_eq!(m.output(t), "1");
    }

    #[test]
    fn synapse_rejects_transmit_loop() {
        assert!("synapse:t".parse::<MachineSpec>().is_err());
        let opts = SynapseOptions {
            loops: [SynapseState::Transmit].into_iter().collect(),
            spontaneous_arousal: false,
        };
        assert!(build(&MachineSpec::Synapse(opts)).is_err());
    }

    #[test]
    fn synapse_needs_two_impulses() {
        let m = spec("synapse:-");
        let t = m.run(&[IMPULSE, IMPULSE], Chooser::Deterministic).unwrap();
        assert_eq!(m.state_name(*t.visited.last().unwrap()), "t");
        assert_eq!(t.emitted.last().unwrap(), "1");
        let one = m.run(&[IMPULSE], Chooser::Deterministic).unwrap();
        assert_eq!(m.state_name(*one.visited.last().unwrap()), "a");
    }

    #[test]
    fn spontaneous_arousal_is_opt_in() {
        let plain = spec("synapse:-");
        assert!(plain.step(StateId(0), TICK).unwrap().is_empty());
        let spont = spec("synapse:-,spontaneous");
        assert_eq!(spont.step(StateId(0), TICK).unwrap().len(), 1);
    }

    #[test]
    fn wheel_returns_and_chain_halts() {
        for k in 1..12 {
            let w = wheel(k);
            let t = w.run(&vec![TICK; k], Chooser::Deterministic).unwrap();
            assert_eq!(*t.visited.last().unwrap(), w.initial());
            let c = chain(k);
            let t = c.run(&vec![TICK; k + 3], Chooser::Deterministic).unwrap();
            assert!(t.halted);
            assert_eq!(t.steps, k - 1);
        }
    }

    #[test]
    fn every_built_machine_validates() {
        for s in [
            "wheel:1", "wheel:7", "wheel:2,loops=a", "chain:1", "chain:9", "synapse:rab",
            "synapse:-", "wire:xy", "akt:state", "akt:activity", "schema:exchange",
            "schema:gravity",
        ] {
            assert!(spec(s).validate(&Constraints::default()).is_empty(), "{s}");
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "wheel:4", "wheel:2,loops=0", "chain:3", "chain:3,loops=0+2", "synapse:rab",
            "synapse:-", "synapse:r,spontaneous", "wire:01", "akt:activity", "schema:exchange",
        ] {
            let parsed: MachineSpec = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
        assert!("wheel:x".parse::<MachineSpec>().is_err());
        assert!("blob:3".parse::<MachineSpec>().is_err());
        assert!("akt:mythical".parse::<MachineSpec>().is_err());
        assert!(build(&"wheel:0".parse().unwrap()).is_err());
        assert!(build(&"wheel:10001".parse().unwrap()).is_err());
        assert!(build(&"wheel:3,loops=5".parse().unwrap()).is_err());
    }

    #[test]
    fn exchange_schema_annotations() {
        let s = schema(SchemaKind::Exchange).unwrap();
        assert_eq!(s.machine.states(), ["b", "mid", "a"]);
        assert_eq!(s.machine.state_name(s.machine.initial()), "b");
        assert!(s.annotations.iter().all(|a| a.state != "mid"));
        assert_eq!(s.fluents().len(), 4);
    }

    #[test]
    fn relabel_signal_to_silent() {
        let w = wheel(4);
        let silent = annotate_outputs(&w, &[("q3", "")]).unwrap();
        assert!(silent.output_alphabet().is_empty());
        assert!(annotate_outputs(&w, &[("q9", "1")]).is_err());
    }

    #[test]
    fn labeled_wheel_blocks() {
        let m = labeled_wheel(&["1", "2", "3"], &[5, 3, 2]).unwrap();
        assert_eq!(m.num_states(), 10);
        assert_eq!(m.output(StateId(4)), "1");
        assert_eq!(m.output(StateId(5)), "2");
        assert_eq!(m.output(StateId(9)), "3");
    }
}
