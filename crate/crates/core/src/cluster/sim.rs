use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::node::{ClusterNode, TickPolicy};
use crate::analysis::{Fractions, OccupancyVector};
use crate::error::{Error, Result};
use crate::machine::{Automaton, AutomatonBuilder, StateId, TICK};

/// Current state of every machine in a cluster, mirroring its shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeState {
    pub current: StateId,
    pub inner: BTreeMap<StateId, NodeState>,
}

impl NodeState {
    fn initial(node: &ClusterNode) -> Self {
        Self {
            current: node.machine().initial(),
            inner: node
                .inner()
                .iter()
                .map(|(q, n)| (*q, NodeState::initial(n)))
                .collect(),
        }
    }
}

/// A cluster configuration plus the base tick counter and the random
/// source used for nondeterministic choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    pub root: NodeState,
    pub ticks: u64,
    pub halted: bool,
    rng: ChaCha8Rng,
}

impl ClusterState {
    pub fn initial(node: &ClusterNode, seed: u64) -> Self {
        Self {
            root: NodeState::initial(node),
            ticks: 0,
            halted: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TickOutput {
    /// The outermost machine took a step on this tick.
    pub advanced: bool,
    /// Its output on entering the new state, when non-silent.
    pub emitted: Option<String>,
    /// Some component had no successor; the cluster stops.
    pub halted: bool,
}

enum Pulse {
    Quiet,
    Fired,
    Halted,
}

fn move_machine(m: &Automaton, st: &mut NodeState, rng: &mut ChaCha8Rng) -> Pulse {
    let e = m.tick_symbol();
    let n = m.successor_count(st.current, e);
    let next = match n {
        0 => return Pulse::Halted,
        1 => m.successors(st.current, e).next().unwrap(),
        _ => m.successors(st.current, e).nth(rng.random_range(0..n)).unwrap(),
    };
    st.current = next;
    if m.is_signaling(next) {
        Pulse::Fired
    } else {
        Pulse::Quiet
    }
}

fn advance(node: &ClusterNode, st: &mut NodeState, rng: &mut ChaCha8Rng) -> (Pulse, bool) {
    match node.policy() {
        TickPolicy::External => {
            let p = move_machine(node.machine(), st, rng);
            (p, true)
        }
        TickPolicy::Union => {
            let mut fire = false;
            for (q, inner) in node.inner() {
                let sub = st.inner.get_mut(q).expect("state mirrors node");
                match advance(inner, sub, rng).0 {
                    Pulse::Halted => return (Pulse::Halted, false),
                    Pulse::Fired => fire = true,
                    Pulse::Quiet => {}
                }
            }
            if fire {
                (move_machine(node.machine(), st, rng), true)
            } else {
                (Pulse::Quiet, false)
            }
        }
        TickPolicy::CurrentState => {
            let Some(inner) = node.inner().get(&st.current) else {
                return (Pulse::Quiet, false);
            };
            let sub = st.inner.get_mut(&st.current).expect("state mirrors node");
            match advance(inner, sub, rng).0 {
                Pulse::Halted => (Pulse::Halted, false),
                Pulse::Fired => (move_machine(node.machine(), st, rng), true),
                Pulse::Quiet => (Pulse::Quiet, false),
            }
        }
    }
}

/// Advances `state` by one elementary tick in place.
pub fn tick_mut(node: &ClusterNode, state: &mut ClusterState) -> TickOutput {
    if state.halted {
        return TickOutput {
            advanced: false,
            emitted: None,
            halted: true,
        };
    }
    let (pulse, advanced) = advance(node, &mut state.root, &mut state.rng);
    state.ticks += 1;
    match pulse {
        Pulse::Halted => {
            state.halted = true;
            TickOutput {
                advanced: false,
                emitted: None,
                halted: true,
            }
        }
        Pulse::Fired => TickOutput {
            advanced,
            emitted: Some(node.machine().output(state.root.current).to_string()),
            halted: false,
        },
        Pulse::Quiet => TickOutput {
            advanced,
            emitted: None,
            halted: false,
        },
    }
}

/// One elementary tick at the fastest driven scale, propagated upward.
/// Inner machines keep their state across outer transitions, and any
/// number of simultaneous inner outputs drive their host once.
pub fn tick(node: &ClusterNode, state: &ClusterState) -> (ClusterState, TickOutput) {
    let mut next = state.clone();
    let out = tick_mut(node, &mut next);
    (next, out)
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub ticks: u64,
    /// Steps taken by the outermost machine.
    pub outer_steps: u64,
    /// Share of base ticks after which the outermost machine sat in each state.
    pub occupancy: OccupancyVector,
    pub halted: bool,
}

pub fn simulate(node: &ClusterNode, ticks: u64, seed: u64) -> SimulationReport {
    let mut state = ClusterState::initial(node, seed);
    let mut counts = vec![0u64; node.machine().num_states()];
    let mut outer_steps = 0;
    let mut done = 0;
    for _ in 0..ticks {
        let out = tick_mut(node, &mut state);
        if out.halted {
            break;
        }
        done += 1;
        if out.advanced {
            outer_steps += 1;
        }
        counts[state.root.current.index()] += 1;
    }
    let denom = done.max(1) as f64;
    SimulationReport {
        ticks: done,
        outer_steps,
        occupancy: OccupancyVector {
            labels: node.machine().states().to_vec(),
            values: Fractions::Float(counts.iter().map(|&c| c as f64 / denom).collect()),
            horizon: done,
        },
        halted: state.halted,
    }
}

fn is_deterministic(node: &ClusterNode) -> bool {
    node.machine().is_deterministic() && node.inner().values().all(is_deterministic)
}

/// The configuration graph of a deterministic cluster as a unary machine:
/// one state per reachable configuration, output taken from the outermost
/// machine, no successor where the cluster halts.
pub fn unfold(node: &ClusterNode, limit: usize) -> Result<Automaton> {
    if !is_deterministic(node) {
        return Err(Error::Unsupported(
            "unfolding needs deterministic components".into(),
        ));
    }
    let start = ClusterState::initial(node, 0);
    let mut ids: HashMap<NodeState, usize> = HashMap::from([(start.root.clone(), 0)]);
    let mut order = vec![start.root.clone()];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        let from = ids[&state.root];
        let (next, out) = tick(node, &state);
        if out.halted {
            continue;
        }
        let to = match ids.get(&next.root) {
            Some(&i) => i,
            None => {
                if order.len() >= limit {
                    return Err(Error::Budget(limit));
                }
                let i = order.len();
                ids.insert(next.root.clone(), i);
                order.push(next.root.clone());
                queue.push_back(next);
                i
            }
        };
        edges.push((from, to));
    }
    let name = |i: usize| format!("c{i}");
    let mut b = AutomatonBuilder::new(format!("unfold({})", node.machine().name()))
        .states((0..order.len()).map(name))
        .input(TICK)
        .initial(name(0));
    for (i, cfg) in order.iter().enumerate() {
        b = b.output(name(i), node.machine().output(cfg.current));
    }
    for (p, q) in edges {
        b = b.edge(name(p), TICK, name(q));
    }
    b.build()
}
