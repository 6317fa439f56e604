use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::menagerie::SynapseState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    /// The static fact the link stands for, such as `parentOf`.
    #[serde(default)]
    pub relation: Option<String>,
}

/// Nodes that each behave like a synapse: two impulses to fire, then a
/// refractory step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationNetwork {
    nodes: BTreeMap<String, SynapseState>,
    links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub fired: Vec<String>,
    /// Node states after the step, as `r`, `a`, `t` or `b`.
    pub states: BTreeMap<String, char>,
}

fn advance(s: SynapseState) -> SynapseState {
    match s {
        SynapseState::Rest => SynapseState::Aroused,
        SynapseState::Aroused => SynapseState::Transmit,
        other => other,
    }
}

impl ActivationNetwork {
    pub fn new<S: Into<String>>(nodes: impl IntoIterator<Item = S>, links: Vec<Link>) -> Result<Self> {
        let nodes: BTreeMap<String, SynapseState> = nodes
            .into_iter()
            .map(|n| (n.into(), SynapseState::Rest))
            .collect();
        for l in &links {
            for end in [&l.from, &l.to] {
                if !nodes.contains_key(end) {
                    return Err(Error::UnknownState(end.clone()));
                }
            }
        }
        Ok(Self { nodes, links })
    }

    pub fn from_doc(doc: &NetworkDoc) -> Result<Self> {
        Self::new(doc.nodes.iter().cloned(), doc.links.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    /// Death of `y` and the `y parentOf x` link both feed `x`'s grief.
    pub fn grief() -> Self {
        Self::from_json(include_str!("../../data/grief_net.json")).expect("bundled network is valid")
    }

    /// The same network when `x` does not know about the death.
    pub fn grief_unaware() -> Self {
        let mut net = Self::grief();
        net.links.retain(|l| l.relation.as_deref() != Some("knows"));
        net
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "grief" | "demo" => Ok(Self::grief()),
            "electra" | "grief-unaware" => Ok(Self::grief_unaware()),
            _ => Err(Error::Invalid(format!("no network preset `{name}`"))),
        }
    }

    pub fn state(&self, node: &str) -> Result<SynapseState> {
        self.nodes
            .get(node)
            .copied()
            .ok_or_else(|| Error::UnknownState(node.to_string()))
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn states(&self) -> BTreeMap<String, char> {
        self.nodes.iter().map(|(n, s)| (n.clone(), s.letter())).collect()
    }

    /// One impulse: rest arouses, aroused transmits, transmitting and
    /// blocked nodes ignore it.
    pub fn inject(&mut self, node: &str) -> Result<()> {
        let s = self
            .nodes
            .get_mut(node)
            .ok_or_else(|| Error::UnknownState(node.to_string()))?;
        *s = advance(*s);
        Ok(())
    }

    /// Transmitting nodes send one impulse along each outgoing link and
    /// block; blocked nodes rest again. Impulses are counted against the
    /// states before the step.
    pub fn step(&mut self) -> Vec<String> {
        let fired: Vec<String> = self
            .nodes
            .iter()
            .filter(|(_, s)| **s == SynapseState::Transmit)
            .map(|(n, _)| n.clone())
            .collect();
        let mut impulses: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &self.links {
            if fired.contains(&l.from) {
                *impulses.entry(l.to.as_str()).or_default() += 1;
            }
        }
        let mut next = self.nodes.clone();
        for (n, s) in next.iter_mut() {
            *s = match *s {
                SynapseState::Transmit => SynapseState::Blocked,
                SynapseState::Blocked => SynapseState::Rest,
                mut cur => {
                    for _ in 0..impulses.get(n.as_str()).copied().unwrap_or(0) {
                        cur = advance(cur);
                    }
                    cur
                }
            };
        }
        self.nodes = next;
        fired
    }

    /// Runs `steps` steps and records what fired at each.
    pub fn trace(&mut self, steps: usize) -> Vec<StepRecord> {
        (1..=steps)
            .map(|step| StepRecord {
                step,
                fired: self.step(),
                states: self.states(),
            })
            .collect()
    }
}
