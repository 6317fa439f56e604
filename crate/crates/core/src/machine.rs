//! Moore automata: representation, structural limits and elementary execution.
//!
//! An [`Automaton`] has an ordered state set, a nonempty input alphabet, a
//! Moore output per state and a set-valued transition function, so the same
//! type covers deterministic, nondeterministic, complete and partial machines.
//! An empty successor set means the machine halts there.
//!
//! The silent output is the empty string. It is printed as `0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The elementary time tick of unary machines.
pub const TICK: &str = "e";

/// How silent outputs are printed.
pub const SILENT_GLYPH: &str = "0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A Moore machine. Immutable once built; see [`AutomatonBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    // delta[state][symbol] = successor set
    delta: Vec<Vec<BTreeSet<usize>>>,
    initial: usize,
    state_index: HashMap<String, usize>,
    symbol_index: HashMap<String, usize>,
}

/// Collects names, outputs and edges, then checks them in [`build`](Self::build).
#[derive(Debug, Clone, Default)]
pub struct AutomatonBuilder {
    name: String,
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<(String, String)>,
    edges: Vec<(String, String, String)>,
    initial: Option<String>,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn states<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn input(mut self, symbol: impl Into<String>) -> Self {
        self.inputs.push(symbol.into());
        self
    }

    pub fn inputs<I, S>(mut self, symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.inputs.extend(symbols.into_iter().map(Into::into));
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial = Some(state.into());
        self
    }

    pub fn output(mut self, state: impl Into<String>, out: impl Into<String>) -> Self {
        self.outputs.push((state.into(), out.into()));
        self
    }

    pub fn edge(
        mut self,
        from: impl Into<String>,
        symbol: impl Into<String>,
        to: impl Into<String>,
    ) -> Self {
        self.edges.push((from.into(), symbol.into(), to.into()));
        self
    }

    pub fn build(self) -> Result<Automaton> {
        if self.states.is_empty() {
            return Err(Error::InvalidMachine("no states".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::InvalidMachine("input alphabet is empty".into()));
        }
        let mut state_index = HashMap::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidMachine(format!("duplicate state `{s}`")));
            }
        }
        let mut symbol_index = HashMap::with_capacity(self.inputs.len());
        for (i, s) in self.inputs.iter().enumerate() {
            if symbol_index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidMachine(format!("duplicate symbol `{s}`")));
            }
        }
        let lookup = |s: &str| {
            state_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownState(s.to_string()))
        };
        let initial = match &self.initial {
            Some(q) => lookup(q)?,
            None => 0,
        };
        let mut outputs = vec![String::new(); self.states.len()];
        for (q, out) in &self.outputs {
            outputs[lookup(q)?] = normalize_output(out);
        }
        let mut delta = vec![vec![BTreeSet::new(); self.inputs.len()]; self.states.len()];
        for (from, sym, to) in &self.edges {
            let p = lookup(from)?;
            let q = lookup(to)?;
            let a = *symbol_index
                .get(sym.as_str())
                .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
            delta[p][a].insert(q);
        }
        Ok(Automaton {
            name: self.name,
            states: self.states,
            inputs: self.inputs,
            outputs,
            delta,
            initial,
            state_index,
            symbol_index,
        })
    }
}

fn normalize_output(out: &str) -> String {
    if out == SILENT_GLYPH {
        String::new()
    } else {
        out.to_string()
    }
}

impl Automaton {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        StateId(self.initial)
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.state_index
            .get(name)
            .map(|&i| StateId(i))
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.symbol_index
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    /// Moore output of `q`; empty when silent.
    pub fn output(&self, q: StateId) -> &str {
        &self.outputs[q.0]
    }

    pub fn is_signaling(&self, q: StateId) -> bool {
        !self.outputs[q.0].is_empty()
    }

    /// Distinct non-silent outputs.
    pub fn output_alphabet(&self) -> BTreeSet<&str> {
        self.outputs
            .iter()
            .filter(|o| !o.is_empty())
            .map(String::as_str)
            .collect()
    }

    pub fn successors(&self, q: StateId, symbol: usize) -> impl Iterator<Item = StateId> + '_ {
        self.delta[q.0][symbol].iter().map(|&i| StateId(i))
    }

    pub fn successor_count(&self, q: StateId, symbol: usize) -> usize {
        self.delta[q.0][symbol].len()
    }

    /// All edges as `(from, symbol index, to)`, ordered by source, symbol, target.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, usize, StateId)> + '_ {
        self.delta.iter().enumerate().flat_map(|(p, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(a, set)| set.iter().map(move |&q| (StateId(p), a, StateId(q))))
        })
    }

    pub fn num_edges(&self) -> usize {
        self.delta.iter().flatten().map(BTreeSet::len).sum()
    }

    pub fn is_unary(&self) -> bool {
        self.inputs.len() == 1
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().flatten().all(|s| s.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().flatten().all(|s| !s.is_empty())
    }

    /// Number of `(symbol, successor)` edges leaving `q`.
    pub fn out_degree(&self, q: StateId) -> usize {
        self.delta[q.0].iter().map(BTreeSet::len).sum()
    }

    /// Number of `(source, symbol)` edges entering each state.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.states.len()];
        for (_, _, q) in self.edges() {
            deg[q.0] += 1;
        }
        deg
    }

    /// The symbol a unary machine is driven by: [`TICK`] when present,
    /// otherwise the first declared symbol.
    pub fn tick_symbol(&self) -> usize {
        self.symbol_index.get(TICK).copied().unwrap_or(0)
    }

    /// A copy with the outputs of the named states replaced.
    pub fn with_outputs<'a, I>(&self, labels: I) -> Result<Automaton>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut out = self.clone();
        for (q, label) in labels {
            let id = self.state_id(q)?;
            out.outputs[id.0] = normalize_output(label);
        }
        Ok(out)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Automaton {
        let mut out = self.clone();
        out.name = name.into();
        out
    }

    /// One transition: every successor of `current` on `symbol` paired with
    /// the output emitted on entering it. An empty result means the machine halts.
    pub fn step(&self, current: StateId, symbol: &str) -> Result<Vec<(StateId, String)>> {
        if current.0 >= self.states.len() {
            return Err(Error::UnknownState(format!("#{}", current.0)));
        }
        let a = self.symbol_index(symbol)?;
        Ok(self
            .successors(current, a)
            .map(|q| (q, self.outputs[q.0].clone()))
            .collect())
    }

    pub fn run<S: AsRef<str>>(&self, input: &[S], chooser: Chooser) -> Result<RunTrace> {
        let symbols = input
            .iter()
            .map(|s| self.symbol_index(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = match chooser {
            Chooser::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut current = self.initial;
        let mut trace = RunTrace {
            visited: vec![StateId(current)],
            emitted: vec![self.outputs[current].clone()],
            steps: 0,
            halted: false,
        };
        for a in symbols {
            let succ = &self.delta[current][a];
            let next = match succ.len() {
                0 => {
                    trace.halted = true;
                    break;
                }
                1 => *succ.iter().next().unwrap(),
                n => match (&chooser, rng.as_mut()) {
                    (Chooser::Deterministic, _) => {
                        return Err(Error::Nondeterministic(self.states[current].clone()))
                    }
                    (_, Some(rng)) => *succ.iter().nth(rng.random_range(0..n)).unwrap(),
                    _ => *succ.iter().next().unwrap(),
                },
            };
            current = next;
            trace.visited.push(StateId(current));
            trace.emitted.push(self.outputs[current].clone());
            trace.steps += 1;
        }
        Ok(trace)
    }

    /// Entry `(p, q)` counts the edges `p -> q` on `symbol`.
    pub fn transition_matrix(&self, symbol: &str) -> Result<Vec<Vec<u64>>> {
        let a = self.symbol_index(symbol)?;
        let n = self.states.len();
        let mut m = vec![vec![0u64; n]; n];
        for (p, row) in self.delta.iter().enumerate() {
            for &q in &row[a] {
                m[p][q] += 1;
            }
        }
        Ok(m)
    }

    /// Graphviz rendering. Parallel edges between the same pair of states
    /// are merged into one edge whose label lists the symbols.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {} {{", dot_id(&self.name));
        let _ = writeln!(s, "  rankdir=LR;");
        let _ = writeln!(s, "  node [shape=circle];");
        for (i, q) in self.states.iter().enumerate() {
            let mut attrs = Vec::new();
            if self.outputs[i].is_empty() {
                attrs.push(format!("label={}", dot_id(q)));
            } else {
                attrs.push(format!("label={}", dot_id(&format!("{q} / {}", self.outputs[i]))));
            }
            if i == self.initial {
                attrs.push("penwidth=2".into());
            }
            let _ = writeln!(s, "  {} [{}];", dot_id(q), attrs.join(", "));
        }
        let mut merged: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
        for (p, a, q) in self.edges() {
            merged.entry((p.0, q.0)).or_default().push(&self.inputs[a]);
        }
        for ((p, q), syms) in merged {
            let _ = writeln!(
                s,
                "  {} -> {} [label={}];",
                dot_id(&self.states[p]),
                dot_id(&self.states[q]),
                dot_id(&syms.join(","))
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn validate(&self, c: &Constraints) -> Vec<Violation> {
        validate(self, c)
    }

    pub fn to_doc(&self) -> MachineDoc {
        let outputs = self
            .states
            .iter()
            .zip(&self.outputs)
            .filter(|(_, o)| !o.is_empty())
            .map(|(q, o)| (q.clone(), o.clone()))
            .collect();
        MachineDoc {
            name: self.name.clone(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            inputs: self.inputs.clone(),
            outputs,
            edges: self
                .edges()
                .map(|(p, a, q)| {
                    [
                        self.states[p.0].clone(),
                        self.inputs[a].clone(),
                        self.states[q.0].clone(),
                    ]
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &MachineDoc) -> Result<Automaton> {
        let mut b = AutomatonBuilder::new(doc.name.clone())
            .states(doc.states.iter().cloned())
            .inputs(doc.inputs.iter().cloned())
            .initial(doc.initial.clone());
        for (q, o) in &doc.outputs {
            b = b.output(q.clone(), o.clone());
        }
        for [p, a, q] in &doc.edges {
            b = b.edge(p.clone(), a.clone(), q.clone());
        }
        b.build()
    }

    /// Serializes to the CMA-JSON machine description format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("machine documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Automaton> {
        let doc: MachineDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// CMA-JSON: `name`, `states`, `initial`, `inputs`, `outputs` (state to
/// output string, silent states omitted) and `edges` as `[from, symbol, to]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDoc {
    pub name: String,
    pub states: Vec<String>,
    pub initial: String,
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: Vec<[String; 3]>,
}

/// How [`Automaton::run`] resolves nondeterministic choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chooser {
    /// Fail on any branching step.
    Deterministic,
    /// Always take the lowest-numbered successor.
    First,
    /// Uniform choice among successors, reproducible from the seed.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub visited: Vec<StateId>,
    /// Output read on entering each visited state, the initial one included.
    pub emitted: Vec<String>,
    pub steps: usize,
    /// Set when an empty successor set cut the run short.
    pub halted: bool,
}

/// Per-layer structural limits. All bounds are exclusive where the rule
/// forbids reaching them (`od`, `id`) and inclusive otherwise (`ss`, `io`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    /// `m`: most states a single layer may have.
    pub max_states: usize,
    /// `s`: largest input or output alphabet.
    pub max_alphabet: usize,
    /// `o`: out-degree must stay below this.
    pub max_out_degree: usize,
    /// `i`: in-degree must stay below this.
    pub max_in_degree: usize,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            max_states: 10_000,
            max_alphabet: 256,
            max_out_degree: 8,
            max_in_degree: 10_000,
        }
    }
}

impl Constraints {
    pub fn new(m: usize, s: usize, o: usize, i: usize) -> Result<Self> {
        if m == 0 || s == 0 || o == 0 || i == 0 {
            return Err(Error::Invalid("constraint bounds must be positive".into()));
        }
        Ok(Self {
            max_states: m,
            max_alphabet: s,
            max_out_degree: o,
            max_in_degree: i,
        })
    }

    /// Parses overrides such as `m=100,o=4`; unspecified bounds keep their defaults.
    pub fn parse_overrides(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("bad constraint `{part}`")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad constraint value `{part}`")))?;
            match key.trim() {
                "m" => c.max_states = value,
                "s" => c.max_alphabet = value,
                "o" => c.max_out_degree = value,
                "i" => c.max_in_degree = value,
                other => return Err(Error::Invalid(format!("unknown constraint `{other}`"))),
            }
        }
        Self::new(c.max_states, c.max_alphabet, c.max_out_degree, c.max_in_degree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Too many states in one layer.
    Ss,
    /// Alphabet too large.
    Io,
    /// Out-degree too large.
    Od,
    /// In-degree too large.
    Id,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Ss => "ss",
            Rule::Io => "io",
            Rule::Od => "od",
            Rule::Id => "id",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// The offending state, or `inputs` / `outputs` / `states`.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.rule, self.subject, self.detail)
    }
}

pub fn validate(a: &Automaton, c: &Constraints) -> Vec<Violation> {
    let mut report = Vec::new();
    if a.num_states() > c.max_states {
        report.push(Violation {
            rule: Rule::Ss,
            subject: "states".into(),
            detail: format!("{} states exceed the limit of {}", a.num_states(), c.max_states),
        });
    }
    if a.inputs().len() > c.max_alphabet {
        report.push(Violation {
            rule: Rule::Io,
            subject: "inputs".into(),
            detail: format!(
                "{} input symbols exceed the limit of {}",
                a.inputs().len(),
                c.max_alphabet
            ),
        });
    }
    let outs = a.output_alphabet().len();
    if outs > c.max_alphabet {
        report.push(Violation {
            rule: Rule::Io,
            subject: "outputs".into(),
            detail: format!("{outs} output symbols exceed the limit of {}", c.max_alphabet),
        });
    }
    for q in a.state_ids() {
        let d = a.out_degree(q);
        if d >= c.max_out_degree {
            report.push(Violation {
                rule: Rule::Od,
                subject: a.state_name(q).to_string(),
                detail: format!("out-degree {d} reaches the bound {}", c.max_out_degree),
            });
        }
    }
    for (i, d) in a.in_degrees().into_iter().enumerate() {
        if d >= c.max_in_degree {
            report.push(Violation {
                rule: Rule::Id,
                subject: a.states()[i].clone(),
                detail: format!("in-degree {d} reaches the bound {}", c.max_in_degree),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn looped_two_wheel() -> Automaton {
        AutomatonBuilder::new("S_2^1")
            .states(["a", "b"])
            .input(TICK)
            .initial("a")
            .output("b", "1")
            .edge("a", TICK, "a")
            .edge("a", TICK, "b")
            .edge("b", TICK, "a")
            .build()
            .unwrap()
    }

    #[test]
    fn step_branches_from_looped_state() {
        let m = looped_two_wheel();
        let a = m.state_id("a").unwrap();
        let b = m.state_id("b").unwrap();
        assert_eq!(
            m.step(a, TICK).unwrap(),
            vec![(a, String::new()), (b, "1".to_string())]
        );
        assert_eq!(m.step(b, TICK).unwrap(), vec![(a, String::new())]);
    }

    #[test]
    fn step_rejects_unknown_symbol() {
        let m = looped_two_wheel();
        assert!(matches!(
            m.step(m.initial(), "x"),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            m.step(StateId(9), TICK),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn matrix_of_looped_wheel() {
        let m = looped_two_wheel();
        assert_eq!(m.transition_matrix(TICK).unwrap(), vec![vec![1, 1], vec![1, 0]]);
        assert!(m.transition_matrix("x").is_err());
    }

    #[test]
    fn deterministic_chooser_refuses_branching() {
        let m = looped_two_wheel();
        assert!(matches!(
            m.run(&[TICK], Chooser::Deterministic),
            Err(Error::Nondeterministic(_))
        ));
        let first = m.run(&[TICK, TICK], Chooser::First).unwrap();
        assert_eq!(first.visited, vec![StateId(0); 3]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let m = looped_two_wheel();
        let input = vec![TICK; 3];
        assert_eq!(
            m.run(&input, Chooser::Seeded(0)).unwrap(),
            m.run(&input, Chooser::Seeded(0)).unwrap()
        );
    }

    #[test]
    fn builder_rejects_bad_references() {
        let err = AutomatonBuilder::new("x")
            .state("a")
            .input(TICK)
            .edge("a", TICK, "z")
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::UnknownState(_)));
        let err = AutomatonBuilder::new("x")
            .state("a")
            .input(TICK)
            .edge("a", "f", "a")
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol(_)));
        assert!(AutomatonBuilder::new("x").state("a").build().is_err());
        assert!(AutomatonBuilder::new("x")
            .states(["a", "a"])
            .input(TICK)
            .build()
            .is_err());
    }

    #[test]
    fn zero_glyph_reads_as_silent() {
        let m = AutomatonBuilder::new("x")
            .state("a")
            .input(TICK)
            .output("a", "0")
            .build()
            .unwrap();
        assert!(!m.is_signaling(m.initial()));
    }

    #[test]
    fn dot_merges_parallel_edges() {
        let m = looped_two_wheel();
        let dot = m.to_dot();
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("b / 1"));
    }

    #[test]
    fn json_round_trip() {
        let m = looped_two_wheel();
        let text = m.to_json();
        let back = Automaton::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn constraint_overrides() {
        let c = Constraints::parse_overrides("m=100, o=4").unwrap();
        assert_eq!(c.max_states, 100);
        assert_eq!(c.max_out_degree, 4);
        assert_eq!(c.max_alphabet, 256);
        assert!(Constraints::parse_overrides("q=1").is_err());
        assert!(Constraints::parse_overrides("m=0").is_err());
    }

    #[test]
    fn out_degree_eight_is_forbidden() {
        let mut b = AutomatonBuilder::new("fan").input(TICK).state("hub");
        for i in 0..8 {
            b = b.state(format!("s{i}")).edge("hub", TICK, format!("s{i}"));
        }
        let report = b.build().unwrap().validate(&Constraints::default());
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].rule, Rule::Od);
        assert_eq!(report[0].subject, "hub");
    }
}
