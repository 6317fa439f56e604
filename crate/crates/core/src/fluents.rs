//! Instants written `i.j` (unit `j` on scale `i`) and fluents evaluated
//! over the window of base units an instant covers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cluster::ScaleSystem;
use crate::error::{Error, Result};
use crate::memory::Tape;
use crate::menagerie::Schema;

/// Windows larger than this are refused rather than scanned.
pub const MAX_WINDOW: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimePoint {
    pub scale: i32,
    /// Negative in the past, 0 now, positive in the future.
    pub index: i64,
}

impl TimePoint {
    pub fn new(scale: i32, index: i64) -> Self {
        Self { scale, index }
    }
}

impl FromStr for TimePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Fluent(format!("expected an instant like `2.-3`, got `{s}`"));
        // Skip a leading sign so `-1.4` splits after the scale.
        let dot = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '.')
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        Ok(Self {
            scale: s[..dot].parse().map_err(|_| bad())?,
            index: s[dot + 1..].parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.scale, self.index)
    }
}

/// Whether `inner` lies in the window of `outer`; unit `k` of an outer scale
/// covers inner indices `[k*B, (k+1)*B)` with `B` the product of the
/// branching factors in between.
pub fn contains(outer: TimePoint, inner: TimePoint, s: &ScaleSystem) -> Result<bool> {
    if inner.scale >= outer.scale {
        return Err(Error::Fluent(format!(
            "{inner} is not on a finer scale than {outer}"
        )));
    }
    let b = s.units_between(inner.scale, outer.scale)? as i128;
    Ok((inner.index as i128).div_euclid(b) == outer.index as i128)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    Undefined,
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// True when every base unit in the window is true.
    Forall,
    /// True when some base unit in the window is true.
    Exists,
    /// Decided by a long enough contiguous run, otherwise undefined.
    Preponderant,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forall" | "all" => Ok(Mode::Forall),
            "exists" | "some" => Ok(Mode::Exists),
            "preponderant" | "prep" => Ok(Mode::Preponderant),
            _ => Err(Error::Fluent(format!("unknown mode `{s}`"))),
        }
    }
}

/// A share of the window strictly above one half and at most all of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold(Ratio<u64>);

impl Threshold {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Fluent("threshold denominator is zero".into()));
        }
        let r = Ratio::new(numer, denom);
        if r <= Ratio::new(1, 2) || r > Ratio::from_integer(1) {
            return Err(Error::Fluent(format!("threshold {r} outside (1/2, 1]")));
        }
        Ok(Self(r))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// Whether a run of `run` units out of `window` meets the threshold.
    pub fn met(&self, run: u128, window: u128) -> bool {
        run * *self.0.denom() as u128 >= window * *self.0.numer() as u128
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self(Ratio::new(2, 3))
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Fluent(format!("expected a fraction like `2/3`, got `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => Self::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None if s.trim() == "1" => Self::new(1, 1),
            None => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Definition {
    Table(BTreeMap<i64, bool>),
    /// True on indices whose residue mod `period` lies in `[start, end)`,
    /// or outside it when `negated`.
    Cyclic {
        period: i64,
        start: i64,
        end: i64,
        negated: bool,
    },
}

impl Definition {
    fn value(&self, j: i64) -> Option<bool> {
        match self {
            Definition::Table(t) => t.get(&j).copied(),
            Definition::Cyclic {
                period,
                start,
                end,
                negated,
            } => {
                let r = j.rem_euclid(*period);
                Some(((*start..*end).contains(&r)) != *negated)
            }
        }
    }
}

/// Fluent values at the base scale; coarser instants are always derived.
#[derive(Debug, Clone)]
pub struct FluentStore {
    base_scale: i32,
    scales: ScaleSystem,
    defs: BTreeMap<String, Definition>,
}

impl FluentStore {
    pub fn new(base_scale: i32, scales: ScaleSystem) -> Result<Self> {
        scales.check_scale(base_scale)?;
        Ok(Self {
            base_scale,
            scales,
            defs: BTreeMap::new(),
        })
    }

    pub fn base_scale(&self) -> i32 {
        self.base_scale
    }

    pub fn scales(&self) -> &ScaleSystem {
        &self.scales
    }

    pub fn fluents(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    /// Records one base-scale value. Conflicting values are refused.
    pub fn assign(&mut self, name: &str, index: i64, value: bool) -> Result<()> {
        let def = self
            .defs
            .entry(name.to_string())
            .or_insert_with(|| Definition::Table(BTreeMap::new()));
        let Definition::Table(t) = def else {
            return Err(Error::Fluent(format!("`{name}` is cyclic and cannot be assigned")));
        };
        match t.insert(index, value) {
            Some(old) if old != value => {
                t.insert(index, old);
                Err(Error::Fluent(format!("`{name}` already {old} at {index}")))
            }
            _ => Ok(()),
        }
    }

    /// Assigns every index in `domain`, true exactly on the given ranges.
    pub fn assign_ranges(&mut self, name: &str, domain: (i64, i64), true_ranges: &[(i64, i64)]) -> Result<()> {
        for j in domain.0..domain.1 {
            let v = true_ranges.iter().any(|&(a, b)| (a..b).contains(&j));
            self.assign(name, j, v)?;
        }
        Ok(())
    }

    /// Installs a fluent true on indices congruent to `range` modulo
    /// `period`, and optionally its complement under a second name.
    pub fn cyclic_fluent(
        &mut self,
        name: &str,
        period: i64,
        range: (i64, i64),
        complement: Option<&str>,
    ) -> Result<()> {
        let (start, end) = range;
        if period < 2 {
            return Err(Error::Fluent(format!("period {period} is below 2")));
        }
        if !(0 <= start && start < end && end - start < period && end <= period) {
            return Err(Error::Fluent(format!(
                "phase [{start}, {end}) must be a nonempty proper part of [0, {period})"
            )));
        }
        let names: Vec<&str> = std::iter::once(name).chain(complement).collect();
        if let Some(taken) = names.iter().find(|n| self.defs.contains_key(**n)) {
            return Err(Error::Fluent(format!("`{taken}` is already defined")));
        }
        for (i, n) in names.into_iter().enumerate() {
            self.defs.insert(
                n.to_string(),
                Definition::Cyclic {
                    period,
                    start,
                    end,
                    negated: i == 1,
                },
            );
        }
        Ok(())
    }

    /// Records bit `k` of `tape` as fluent `F_k` at base index `j`.
    pub fn record_tape(&mut self, j: i64, tape: &Tape) -> Result<()> {
        for (k, bit) in tape.content().into_iter().enumerate() {
            self.assign(&format!("F_{k}"), j, bit)?;
        }
        Ok(())
    }

    pub fn value(&self, name: &str, base_index: i64) -> Result<Option<bool>> {
        Ok(self.def(name)?.value(base_index))
    }

    fn def(&self, name: &str) -> Result<&Definition> {
        self.defs
            .get(name)
            .ok_or_else(|| Error::Fluent(format!("unknown fluent `{name}`")))
    }

    /// Base-scale values covered by `at`, in order.
    pub fn window(&self, name: &str, at: TimePoint) -> Result<Vec<bool>> {
        let def = self.def(name)?;
        self.scales.check_scale(at.scale)?;
        if at.scale < self.base_scale {
            return Err(Error::Fluent(format!(
                "{at} lies below the base scale {}",
                self.base_scale
            )));
        }
        let w = self.scales.units_between(self.base_scale, at.scale)?;
        if w > MAX_WINDOW {
            return Err(Error::Fluent(format!("window of {w} base units is too large")));
        }
        let start = (at.index as i128) * w as i128;
        (0..w as i128)
            .map(|o| {
                let j = i64::try_from(start + o)
                    .map_err(|_| Error::Fluent(format!("{at} is out of range")))?;
                def.value(j).ok_or_else(|| {
                    Error::Fluent(format!("`{name}` has no value at base index {j}"))
                })
            })
            .collect()
    }

    pub fn eval(&self, name: &str, at: TimePoint, mode: Mode, theta: Threshold) -> Result<TruthValue> {
        Ok(judge(&self.window(name, at)?, mode, theta))
    }
}

fn longest_run(values: &[bool], target: bool) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &v in values {
        cur = if v == target { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

/// Truth of a window under one mode. Runs do not wrap around the ends.
pub fn judge(values: &[bool], mode: Mode, theta: Threshold) -> TruthValue {
    match mode {
        Mode::Forall => values.iter().all(|&v| v).into(),
        Mode::Exists => values.iter().any(|&v| v).into(),
        Mode::Preponderant => {
            let w = values.len() as u128;
            if theta.met(longest_run(values, true) as u128, w) {
                TruthValue::True
            } else if theta.met(longest_run(values, false) as u128, w) {
                TruthValue::False
            } else {
                TruthValue::Undefined
            }
        }
    }
}

/// Fluent values in each state of a schema; fluents a state does not
/// annotate are undefined there.
pub fn schema_eval(schema: &Schema) -> BTreeMap<String, BTreeMap<String, TruthValue>> {
    let fluents: BTreeSet<&str> = schema.fluents();
    schema
        .machine
        .states()
        .iter()
        .map(|q| {
            let row = fluents
                .iter()
                .map(|&f| {
                    let v = schema
                        .annotations
                        .iter()
                        .find(|a| &a.state == q && a.fluent == f)
                        .map_or(TruthValue::Undefined, |a| a.holds.into());
                    (f.to_string(), v)
                })
                .collect();
            (q.clone(), row)
        })
        .collect()
}

/// On-disk form of a store: explicit true ranges over a domain, plus cyclic
/// declarations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreDoc {
    #[serde(default)]
    pub base_scale: i32,
    #[serde(default = "modern")]
    pub scales: String,
    /// Half-open base-index range in which table fluents are fully assigned.
    #[serde(default)]
    pub domain: Option<(i64, i64)>,
    #[serde(default)]
    pub fluents: BTreeMap<String, Vec<(i64, i64)>>,
    #[serde(default)]
    pub cyclic: Vec<CyclicDoc>,
}

fn modern() -> String {
    "modern".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicDoc {
    pub name: String,
    pub period: i64,
    pub range: (i64, i64),
    #[serde(default)]
    pub complement: Option<String>,
}

impl FluentStore {
    pub fn from_doc(doc: &StoreDoc) -> Result<Self> {
        let mut store = Self::new(doc.base_scale, ScaleSystem::preset(&doc.scales)?)?;
        if !doc.fluents.is_empty() {
            let domain = doc
                .domain
                .ok_or_else(|| Error::Fluent("range fluents need a `domain`".into()))?;
            for (name, ranges) in &doc.fluents {
                store.assign_ranges(name, domain, ranges)?;
            }
        }
        for c in &doc.cyclic {
            store.cyclic_fluent(&c.name, c.period, c.range, c.complement.as_deref())?;
        }
        Ok(store)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}
