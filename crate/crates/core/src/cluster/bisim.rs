use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::Result;
use crate::machine::{Automaton, AutomatonBuilder, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bisimulation {
    pub bisimilar: bool,
    /// Coarsest output-respecting bisimulation on the disjoint union, with
    /// states written `left:q` and `right:q`.
    pub partition: Vec<Vec<String>>,
}

/// Flattened view of several machines whose symbols are matched by name.
struct Union<'a> {
    machines: Vec<&'a Automaton>,
    offsets: Vec<usize>,
    symbols: Vec<String>,
}

impl<'a> Union<'a> {
    fn new(machines: Vec<&'a Automaton>) -> Self {
        let mut offsets = Vec::with_capacity(machines.len());
        let mut total = 0;
        for m in &machines {
            offsets.push(total);
            total += m.num_states();
        }
        let symbols: BTreeSet<String> = machines
            .iter()
            .flat_map(|m| m.inputs().iter().cloned())
            .collect();
        Self {
            machines,
            offsets,
            symbols: symbols.into_iter().collect(),
        }
    }

    fn len(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0)
            + self.machines.last().map_or(0, |m| m.num_states())
    }

    fn locate(&self, g: usize) -> (usize, StateId) {
        let i = self.offsets.partition_point(|&o| o <= g) - 1;
        (i, StateId(g - self.offsets[i]))
    }

    /// Successors of global state `g` under each shared symbol.
    fn successors(&self) -> Vec<Vec<Vec<usize>>> {
        (0..self.len())
            .map(|g| {
                let (i, q) = self.locate(g);
                let m = self.machines[i];
                self.symbols
                    .iter()
                    .map(|s| match m.symbol_index(s) {
                        Ok(k) => m.successors(q, k).map(|r| self.offsets[i] + r.index()).collect(),
                        Err(_) => Vec::new(),
                    })
                    .collect()
            })
            .collect()
    }

    /// Block index per global state after refinement to a fixed point.
    fn refine(&self) -> Vec<usize> {
        let succ = self.successors();
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut block: Vec<usize> = (0..self.len())
            .map(|g| {
                let (i, q) = self.locate(g);
                let next = ids.len();
                *ids.entry(self.machines[i].output(q)).or_insert(next)
            })
            .collect();
        let mut count = ids.len();
        loop {
            let mut sigs: HashMap<(usize, Vec<BTreeSet<usize>>), usize> = HashMap::new();
            let next: Vec<usize> = (0..self.len())
                .map(|g| {
                    let sig = (
                        block[g],
                        succ[g]
                            .iter()
                            .map(|rs| rs.iter().map(|&r| block[r]).collect())
                            .collect(),
                    );
                    let n = sigs.len();
                    *sigs.entry(sig).or_insert(n)
                })
                .collect();
            let new_count = sigs.len();
            block = next;
            if new_count == count {
                return block;
            }
            count = new_count;
        }
    }
}

/// Decides whether the initial states of `a` and `b` are bisimilar when
/// states are labeled by their Moore output.
pub fn bisimilar(a: &Automaton, b: &Automaton) -> Bisimulation {
    let u = Union::new(vec![a, b]);
    let block = u.refine();
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (g, &k) in block.iter().enumerate() {
        let (i, q) = u.locate(g);
        let side = if i == 0 { "left" } else { "right" };
        groups
            .entry(k)
            .or_default()
            .push(format!("{side}:{}", u.machines[i].state_name(q)));
    }
    Bisimulation {
        bisimilar: block[a.initial().index()] == block[u.offsets[1] + b.initial().index()],
        partition: groups.into_values().collect(),
    }
}

/// The machine with bisimilar states merged. Only states reachable from
/// the initial state are kept.
pub fn quotient(a: &Automaton) -> Result<Automaton> {
    let u = Union::new(vec![a]);
    let block = u.refine();
    let mut order: Vec<usize> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![a.initial()];
    while let Some(q) = stack.pop() {
        if !seen.insert(q) {
            continue;
        }
        if !order.contains(&block[q.index()]) {
            order.push(block[q.index()]);
        }
        for (s, _) in a.inputs().iter().enumerate() {
            stack.extend(a.successors(q, s));
        }
    }
    let name = |k: usize| format!("[{}]", order.iter().position(|&b| b == k).unwrap());
    let mut builder = AutomatonBuilder::new(format!("{}/~", a.name()))
        .states(order.iter().map(|&k| name(k)))
        .inputs(a.inputs().iter().cloned())
        .initial(name(block[a.initial().index()]));
    for &q in &seen {
        builder = builder.output(name(block[q.index()]), a.output(q));
    }
    let mut edges = BTreeSet::new();
    for (p, s, q) in a.edges() {
        if seen.contains(&p) {
            edges.insert((block[p.index()], s, block[q.index()]));
        }
    }
    for (p, s, q) in edges {
        builder = builder.edge(name(p), a.inputs()[s].clone(), name(q));
    }
    builder.build()
}
