use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use super::bisim::quotient;
use super::cycle::{cycle_length, WheelCluster};
use super::node::ClusterNode;
use super::scales::ScaleSystem;
use super::sim::unfold;
use crate::error::{Error, Result};
use crate::machine::{Automaton, AutomatonBuilder, StateId, TICK};
use crate::menagerie::{chain, state_name, wheel};

/// The five families of discrete time: bi-infinite, forward-infinite,
/// backward-infinite, bounded linear and cyclic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Z,
    N,
    P,
    L,
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalClass {
    pub family: Family,
    /// Cycle or chain length, present for C and L only.
    #[serde(serialize_with = "decimal")]
    pub size: Option<BigUint>,
    /// A finite structure longer than the horizon, reported as infinite.
    pub effective: bool,
    /// The chain ends in a state that loops on itself.
    pub absorbing: bool,
    /// States walked before entering the cycle.
    pub lead_in: usize,
}

fn decimal<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

impl TemporalClass {
    fn finite(family: Family, size: usize) -> Self {
        Self {
            family,
            size: Some(BigUint::from(size)),
            effective: false,
            absorbing: false,
            lead_in: 0,
        }
    }

    fn infinite(family: Family) -> Self {
        Self {
            family,
            size: None,
            effective: false,
            absorbing: false,
            lead_in: 0,
        }
    }

    pub fn cyclic(c: usize) -> Self {
        Self::finite(Family::C, c)
    }

    pub fn linear(k: usize) -> Self {
        Self::finite(Family::L, k)
    }
}

impl fmt::Display for TemporalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.size {
            Some(n) => write!(f, "{:?}({n})", self.family),
            None => write!(f, "{:?}", self.family),
        }
    }
}

/// Endpoints the modeler declares open, beyond what a finite run shows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Openness {
    /// Time extends without bound into the past.
    pub open_start: bool,
    /// Time extends without bound into the future.
    pub open_end: bool,
}

pub fn default_horizon() -> BigUint {
    BigUint::one() << 64
}

pub fn classify(a: &Automaton) -> Result<TemporalClass> {
    classify_with(a, &default_horizon(), Openness::default())
}

/// Walks the reachable part of a unary machine from its initial state.
/// Nondeterministic machines are classified through their bisimulation
/// quotient when that is deterministic.
pub fn classify_with(a: &Automaton, horizon: &BigUint, declared: Openness) -> Result<TemporalClass> {
    if !a.is_unary() {
        return Err(Error::Unsupported(format!(
            "`{}` reads {} symbols; classification needs a unary machine",
            a.name(),
            a.inputs().len()
        )));
    }
    if !a.is_deterministic() {
        let q = quotient(a)?;
        if !q.is_deterministic() {
            return Err(Error::Unsupported(format!(
                "`{}` branches in a way no bisimulation removes",
                a.name()
            )));
        }
        return classify_with(&q, horizon, declared);
    }
    let mut seen: HashMap<StateId, usize> = HashMap::new();
    let mut q = Some(a.initial());
    while let Some(cur) = q {
        if let Some(&j) = seen.get(&cur) {
            let n = seen.len();
            let c = n - j;
            let class = if j > 0 && c == 1 {
                TemporalClass {
                    absorbing: true,
                    ..TemporalClass::linear(n)
                }
            } else {
                TemporalClass {
                    lead_in: j,
                    ..TemporalClass::cyclic(c)
                }
            };
            return finish(class, horizon, declared);
        }
        seen.insert(cur, seen.len());
        q = a.successors(cur, 0).next();
    }
    finish(TemporalClass::linear(seen.len()), horizon, declared)
}

fn finish(mut class: TemporalClass, horizon: &BigUint, declared: Openness) -> Result<TemporalClass> {
    if class.family == Family::C && (declared.open_start || declared.open_end) {
        return Err(Error::Invalid("a cyclic structure has no endpoints to open".into()));
    }
    let family = match (declared.open_start, declared.open_end) {
        (true, true) => Some(Family::Z),
        (false, true) => Some(Family::N),
        (true, false) => Some(Family::P),
        (false, false) => None,
    };
    if let Some(family) = family {
        return Ok(TemporalClass {
            absorbing: class.absorbing,
            ..TemporalClass::infinite(family)
        });
    }
    if class.size.as_ref().is_some_and(|s| s > horizon) {
        class.family = match class.family {
            Family::C => Family::Z,
            _ => Family::N,
        };
        class.size = None;
        class.effective = true;
    }
    Ok(class)
}

/// Classifies the outer timescale of a cluster: analytically for all-wheel
/// union clusters, otherwise by unfolding its configuration graph.
pub fn classify_cluster(n: &ClusterNode, horizon: &BigUint, unfold_limit: usize) -> Result<TemporalClass> {
    if WheelCluster::from_node(n).is_ok() {
        let c = cycle_length(n)?;
        let class = TemporalClass {
            size: Some(c.value),
            ..TemporalClass::infinite(Family::C)
        };
        return finish(class, horizon, Openness::default());
    }
    classify_with(&unfold(n, unfold_limit)?, horizon, Openness::default())
}

/// The representative of a finite class: `S_c` for C(c), `E_k` for L(k),
/// and `E_k` with a loop on its last state for an absorbing L(k).
pub fn canonical(class: &TemporalClass) -> Result<Automaton> {
    let size = class
        .size
        .as_ref()
        .and_then(|s| usize::try_from(s).ok())
        .ok_or_else(|| Error::Unsupported(format!("{class} has no finite representative")))?;
    match (class.family, class.absorbing) {
        (Family::C, _) => Ok(wheel(size)),
        (Family::L, false) => Ok(chain(size)),
        (Family::L, true) => {
            let last = state_name(size - 1);
            let mut b = AutomatonBuilder::new(format!("E_{size}^abs"))
                .states((0..size).map(state_name))
                .input(TICK)
                .initial(state_name(0))
                .output(last.clone(), "1")
                .edge(last.clone(), TICK, last);
            for i in 1..size {
                b = b.edge(state_name(i - 1), TICK, state_name(i));
            }
            b.build()
        }
        _ => Err(Error::Unsupported(format!("{class} has no finite representative"))),
    }
}

/// Places `a` and `b` in the two states of an outer two-wheel one scale
/// above `inner_scale`, so that either inner signal moves the outer wheel.
pub fn product(a: &Automaton, b: &Automaton, inner_scale: i32, scales: &ScaleSystem) -> Result<ClusterNode> {
    for m in [a, b] {
        if !m.is_unary() {
            return Err(Error::Unsupported(format!("`{}` is not unary", m.name())));
        }
    }
    scales.check_scale(inner_scale)?;
    let outer = inner_scale
        .checked_add(1)
        .filter(|&s| scales.contains_scale(s))
        .ok_or_else(|| Error::Scale(format!("no scale above {inner_scale}")))?;
    ClusterNode::leaf(wheel(2).renamed(format!("{}x{}", a.name(), b.name())), outer)
        .with_inner(&state_name(0), ClusterNode::leaf(a.clone(), inner_scale))?
        .with_inner(&state_name(1), ClusterNode::leaf(b.clone(), inner_scale))
}
