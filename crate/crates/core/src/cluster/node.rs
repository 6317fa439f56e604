use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::scales::ScaleSystem;
use crate::error::{Error, Result};
use crate::machine::{Automaton, Constraints, MachineDoc, StateId, Violation};

/// What advances a node's own machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TickPolicy {
    /// One step per tick of the node's own scale.
    External,
    /// Every inner machine runs; any non-silent inner output is one tick.
    #[default]
    Union,
    /// Only the inner machine of the occupied state runs.
    CurrentState,
}

impl FromStr for TickPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "external" => Ok(TickPolicy::External),
            "union" => Ok(TickPolicy::Union),
            "current" | "current-state" => Ok(TickPolicy::CurrentState),
            _ => Err(Error::Invalid(format!("unknown tick policy `{s}`"))),
        }
    }
}

impl fmt::Display for TickPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TickPolicy::External => "external",
            TickPolicy::Union => "union",
            TickPolicy::CurrentState => "current-state",
        })
    }
}

/// A machine at a timescale whose states may hold machines running on
/// strictly faster scales.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterNode {
    machine: Automaton,
    scale: i32,
    inner: BTreeMap<StateId, ClusterNode>,
    policy: TickPolicy,
}

impl ClusterNode {
    /// An externally driven node with no inner machines.
    pub fn leaf(machine: Automaton, scale: i32) -> Self {
        Self {
            machine,
            scale,
            inner: BTreeMap::new(),
            policy: TickPolicy::External,
        }
    }

    /// Places `inner` inside `state` and switches an external node to the
    /// union policy.
    pub fn with_inner(mut self, state: &str, inner: ClusterNode) -> Result<Self> {
        let q = self.machine.state_id(state)?;
        self.inner.insert(q, inner);
        if self.policy == TickPolicy::External {
            self.policy = TickPolicy::Union;
        }
        Ok(self)
    }

    pub fn with_policy(mut self, policy: TickPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn machine(&self) -> &Automaton {
        &self.machine
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn policy(&self) -> TickPolicy {
        self.policy
    }

    pub fn inner(&self) -> &BTreeMap<StateId, ClusterNode> {
        &self.inner
    }

    pub fn depth(&self) -> usize {
        1 + self.inner.values().map(ClusterNode::depth).max().unwrap_or(0)
    }

    /// Total number of machines in the tree.
    pub fn size(&self) -> usize {
        1 + self.inner.values().map(ClusterNode::size).sum::<usize>()
    }

    pub fn to_doc(&self) -> ClusterDoc {
        ClusterDoc {
            machine: self.machine.to_doc(),
            scale: self.scale,
            tick_policy: self.policy,
            inner: self
                .inner
                .iter()
                .map(|(q, n)| (self.machine.state_name(*q).to_string(), n.to_doc()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &ClusterDoc) -> Result<Self> {
        let machine = Automaton::from_doc(&doc.machine)?;
        let mut inner = BTreeMap::new();
        for (q, sub) in &doc.inner {
            inner.insert(machine.state_id(q)?, ClusterNode::from_doc(sub)?);
        }
        Ok(Self {
            machine,
            scale: doc.scale,
            inner,
            policy: doc.tick_policy,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("cluster documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

/// CMA-JSON extended with `scale`, `tick_policy` and per-state `inner` documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDoc {
    #[serde(flatten)]
    pub machine: MachineDoc,
    #[serde(default)]
    pub scale: i32,
    #[serde(default = "external")]
    pub tick_policy: TickPolicy,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inner: BTreeMap<String, ClusterDoc>,
}

fn external() -> TickPolicy {
    TickPolicy::External
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClusterViolation {
    /// A layer breaks the per-layer limits.
    Layer { path: String, violation: Violation },
    /// An inner node does not run strictly faster than its host.
    NotFaster { path: String, outer: i32, inner: i32 },
    BelowMin { path: String, scale: i32, min: i32 },
    AboveMax { path: String, scale: i32, max: i32 },
    /// An internally driven node without inner machines.
    NoDriver { path: String, policy: TickPolicy },
}

impl fmt::Display for ClusterViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterViolation::Layer { path, violation } => write!(f, "{path}: {violation}"),
            ClusterViolation::NotFaster { path, outer, inner } => {
                write!(f, "{path}: inner scale {inner} is not below outer scale {outer}")
            }
            ClusterViolation::BelowMin { path, scale, min } => {
                write!(f, "{path}: scale {scale} is below the minimum {min}")
            }
            ClusterViolation::AboveMax { path, scale, max } => {
                write!(f, "{path}: scale {scale} is above the maximum {max}")
            }
            ClusterViolation::NoDriver { path, policy } => {
                write!(f, "{path}: policy {policy} needs at least one inner machine")
            }
        }
    }
}

/// Checks each layer against `c`, strict scale decrease, scale bounds and
/// that internally driven nodes have something to drive them. The tree is
/// finite by construction.
pub fn validate_cluster(n: &ClusterNode, s: &ScaleSystem, c: &Constraints) -> Vec<ClusterViolation> {
    let mut out = Vec::new();
    walk(n, s, c, n.machine.name().to_string(), &mut out);
    out
}

fn walk(n: &ClusterNode, s: &ScaleSystem, c: &Constraints, path: String, out: &mut Vec<ClusterViolation>) {
    for violation in n.machine.validate(c) {
        out.push(ClusterViolation::Layer {
            path: path.clone(),
            violation,
        });
    }
    if n.scale < s.min_scale() {
        out.push(ClusterViolation::BelowMin {
            path: path.clone(),
            scale: n.scale,
            min: s.min_scale(),
        });
    }
    if n.scale > s.max_scale() {
        out.push(ClusterViolation::AboveMax {
            path: path.clone(),
            scale: n.scale,
            max: s.max_scale(),
        });
    }
    if n.policy != TickPolicy::External && n.inner.is_empty() {
        out.push(ClusterViolation::NoDriver {
            path: path.clone(),
            policy: n.policy,
        });
    }
    for (q, inner) in &n.inner {
        let sub = format!("{path}/{}", n.machine.state_name(*q));
        if inner.scale >= n.scale {
            out.push(ClusterViolation::NotFaster {
                path: sub.clone(),
                outer: n.scale,
                inner: inner.scale,
            });
        }
        walk(inner, s, c, sub, out);
    }
}
