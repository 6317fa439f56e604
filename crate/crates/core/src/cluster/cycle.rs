use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use super::node::{ClusterNode, TickPolicy};
use super::sim::{tick_mut, ClusterState, NodeState};
use crate::error::{Error, Result};
use crate::machine::Automaton;

/// Above this many base ticks the emission count of a block is no longer
/// enumerated tick by tick.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Analytic results up to this size are replayed on the real cluster.
pub const VERIFY_LIMIT: u64 = 1_000_000;

/// The shape of an all-wheel cluster, without the machines themselves.
///
/// A cluster of a thousand wheels with several thousand states each is far
/// too large to build, but its cycle structure fits in a few kilobytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheelCluster {
    pub length: u64,
    /// Positions, counted in steps from the initial state, whose state signals.
    pub signals: Vec<u64>,
    /// Inner clusters, all driven by the same base tick.
    pub inner: Vec<WheelCluster>,
}

impl WheelCluster {
    /// A wheel of `length` states that signals in its last state.
    pub fn wheel(length: u64) -> Self {
        Self {
            length,
            signals: vec![length - 1],
            inner: Vec::new(),
        }
    }

    pub fn with_inner(mut self, inner: Vec<WheelCluster>) -> Self {
        self.inner = inner;
        self
    }

    /// Reads the wheel structure off a cluster whose machines are all pure
    /// deterministic cycles and whose internal nodes use the union policy.
    pub fn from_node(n: &ClusterNode) -> Result<Self> {
        let (length, signals) = wheel_shape(n.machine())?;
        if !n.inner().is_empty() && n.policy() != TickPolicy::Union {
            return Err(Error::Unsupported(format!(
                "`{}` uses the {} policy; cycle analysis needs union",
                n.machine().name(),
                n.policy()
            )));
        }
        let inner = n
            .inner()
            .values()
            .map(WheelCluster::from_node)
            .collect::<Result<_>>()?;
        Ok(Self {
            length,
            signals,
            inner,
        })
    }

    pub fn depth(&self) -> usize {
        1 + self.inner.iter().map(WheelCluster::depth).max().unwrap_or(0)
    }
}

fn wheel_shape(a: &Automaton) -> Result<(u64, Vec<u64>)> {
    let not_wheel = || Error::Unsupported(format!("`{}` is not a pure wheel", a.name()));
    if !a.is_unary() || !a.is_deterministic() || !a.is_complete() {
        return Err(not_wheel());
    }
    let mut q = a.initial();
    let mut signals = Vec::new();
    for pos in 0..a.num_states() {
        if pos > 0 && q == a.initial() {
            return Err(not_wheel());
        }
        if a.is_signaling(q) {
            signals.push(pos as u64);
        }
        q = a.successors(q, 0).next().unwrap();
    }
    if q != a.initial() {
        return Err(not_wheel());
    }
    Ok((a.num_states() as u64, signals))
}

/// Period and emissions per period of one node.
struct Rhythm {
    period: BigUint,
    emissions: BigUint,
}

fn rhythm(w: &WheelCluster) -> Result<Rhythm> {
    let signals = BigUint::from(w.signals.len());
    if w.inner.is_empty() {
        return Ok(Rhythm {
            period: BigUint::from(w.length),
            emissions: signals,
        });
    }
    let inner: Vec<Rhythm> = w.inner.iter().map(rhythm).collect::<Result<_>>()?;
    let block = inner
        .iter()
        .fold(BigUint::one(), |acc, r| acc.lcm(&r.period));
    let driven = driving_ticks(w, &inner, &block)?;
    let len = BigUint::from(w.length);
    let blocks = &len / driven.gcd(&len);
    let steps = &blocks * &driven;
    Ok(Rhythm {
        period: &blocks * &block,
        emissions: steps / &len * signals,
    })
}

/// Ticks in one block `[1, lcm]` on which at least one inner node emits.
fn driving_ticks(w: &WheelCluster, inner: &[Rhythm], block: &BigUint) -> Result<BigUint> {
    if let Some(l) = block.to_u64().filter(|&l| l <= ENUMERATION_LIMIT) {
        let patterns: Vec<Vec<bool>> = w
            .inner
            .iter()
            .map(|c| pattern(c, l))
            .collect::<Result<_>>()?;
        let count = (1..=l)
            .filter(|t| patterns.iter().any(|p| p[(t % p.len() as u64) as usize]))
            .count();
        return Ok(BigUint::from(count));
    }
    let pairwise_coprime = inner.iter().enumerate().all(|(i, a)| {
        inner[i + 1..]
            .iter()
            .all(|b| a.period.gcd(&b.period).is_one())
    });
    if !pairwise_coprime {
        return Err(Error::Unsupported(format!(
            "block of {} digits with non-coprime inner periods",
            block.to_string().len()
        )));
    }
    // With coprime periods the residues are independent, so the quiet
    // ticks in a block are the product of per-wheel quiet counts.
    let quiet = inner
        .iter()
        .fold(BigUint::one(), |acc, r| acc * (&r.period - &r.emissions));
    Ok(block - quiet)
}

/// Emission flags of `w` over one period, indexed by tick modulo the period.
fn pattern(w: &WheelCluster, limit: u64) -> Result<Vec<bool>> {
    if w.inner.is_empty() {
        let mut p = vec![false; w.length as usize];
        for &s in &w.signals {
            p[s as usize] = true;
        }
        return Ok(p);
    }
    let period = rhythm(w)?
        .period
        .to_u64()
        .filter(|&p| p <= limit)
        .ok_or_else(|| Error::Unsupported("inner period too long to enumerate".into()))?;
    let inner: Vec<Vec<bool>> = w
        .inner
        .iter()
        .map(|c| pattern(c, limit))
        .collect::<Result<_>>()?;
    let mut out = vec![false; period as usize];
    let mut pos = 0u64;
    for t in 1..=period {
        if inner.iter().any(|p| p[(t % p.len() as u64) as usize]) {
            pos = (pos + 1) % w.length;
            out[(t % period) as usize] = w.signals.contains(&pos);
        }
    }
    Ok(out)
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleLength {
    /// Base ticks until the whole configuration first returns to its start.
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
    pub digits: usize,
    /// The value was also reached by running the cluster tick by tick.
    pub simulated: bool,
}

impl CycleLength {
    fn new(value: BigUint) -> Self {
        let digits = value.to_string().len();
        Self {
            value,
            digits,
            simulated: false,
        }
    }
}

/// Exact first-return time of a descriptor, never simulated.
pub fn wheel_cluster_cycle(w: &WheelCluster) -> Result<CycleLength> {
    Ok(CycleLength::new(rhythm(w)?.period))
}

/// First-return time of an all-wheel union cluster, computed from the lcm of
/// the inner periods and the outer wheel's drift per block. Small results are
/// checked against a direct run.
pub fn cycle_length(n: &ClusterNode) -> Result<CycleLength> {
    let mut out = wheel_cluster_cycle(&WheelCluster::from_node(n)?)?;
    if let Some(v) = out.value.to_u64().filter(|&v| v <= VERIFY_LIMIT) {
        match first_return(n, v) {
            Some(t) if t == v => out.simulated = true,
            other => {
                return Err(Error::Invalid(format!(
                    "analytic cycle {v} disagrees with simulation ({other:?})"
                )))
            }
        }
    }
    Ok(out)
}

/// Runs the cluster until its full configuration equals the initial one,
/// giving up after `limit` ticks or on a halt.
pub fn first_return(n: &ClusterNode, limit: u64) -> Option<u64> {
    let mut st = ClusterState::initial(n, 0);
    let start: NodeState = st.root.clone();
    for t in 1..=limit {
        if tick_mut(n, &mut st).halted {
            return None;
        }
        if st.root == start {
            return Some(t);
        }
    }
    None
}

fn primes_below(m: u64) -> Vec<u64> {
    let m = m as usize;
    let mut sieve = vec![true; m.max(2)];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < m {
        if sieve[i] {
            for j in (i * i..m).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (0..m as u64).filter(|&p| sieve[p as usize]).collect()
}

/// One outer wheel per prime below `m`, each state holding a wheel whose
/// length is the largest power of that prime below `m`.
pub fn prime_power_construction(m: u64) -> WheelCluster {
    let primes = primes_below(m);
    let inner = primes
        .iter()
        .map(|&p| {
            let mut q = p;
            while q * p < m {
                q *= p;
            }
            WheelCluster::wheel(q)
        })
        .collect();
    WheelCluster::wheel(primes.len() as u64).with_inner(inner)
}

/// Brute-force check for descriptors: steps every wheel until all return.
#[cfg(test)]
fn descriptor_first_return(w: &WheelCluster, limit: u64) -> Option<u64> {
    fn step(w: &WheelCluster, pos: &mut Vec<u64>, at: usize) -> (bool, usize) {
        // Returns (emitted, next free slot) over a flattened position vector.
        let me = at;
        let mut next = at + 1;
        if w.inner.is_empty() {
            pos[me] = (pos[me] + 1) % w.length;
            return (w.signals.contains(&pos[me]), next);
        }
        let mut fire = false;
        for c in &w.inner {
            let (f, n) = step(c, pos, next);
            fire |= f;
            next = n;
        }
        if fire {
            pos[me] = (pos[me] + 1) % w.length;
        }
        (fire && w.signals.contains(&pos[me]), next)
    }
    fn count(w: &WheelCluster) -> usize {
        1 + w.inner.iter().map(count).sum::<usize>()
    }
    let mut pos = vec![0u64; count(w)];
    for t in 1..=limit {
        step(w, &mut pos, 0);
        if pos.iter().all(|&p| p == 0) {
            return Some(t);
        }
    }
    None
}
