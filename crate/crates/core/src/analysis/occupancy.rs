use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::machine::{Automaton, SILENT_GLYPH};

/// Beyond this many steps path counts are tracked as normalized floats.
pub const EXACT_PATH_LIMIT: u64 = 200;

/// Fractions of time (or of paths) per state or per output signal.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyVector {
    pub labels: Vec<String>,
    pub values: Fractions,
    /// Number of steps the estimate is based on; 0 for limits.
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fractions {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl OccupancyVector {
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.values {
            Fractions::Exact(v) => v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect(),
            Fractions::Float(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        match &self.values {
            Fractions::Exact(v) => Some(v),
            Fractions::Float(_) => None,
        }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.to_f64()[i])
    }

    pub fn get_exact(&self, label: &str) -> Option<&BigRational> {
        let i = self.labels.iter().position(|l| l == label)?;
        self.exact().map(|v| &v[i])
    }

    /// Largest absolute componentwise difference from `other`, matched by position.
    pub fn max_deviation(&self, other: &[f64]) -> f64 {
        self.to_f64()
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Regroups per-state fractions of `a` by output signal. Silent states
    /// are collected under `0`. Labels are sorted.
    pub fn by_signal(&self, a: &Automaton) -> OccupancyVector {
        let signal = |label: &str| -> String {
            let out = a.state_id(label).map(|q| a.output(q)).unwrap_or("");
            if out.is_empty() {
                SILENT_GLYPH.to_string()
            } else {
                out.to_string()
            }
        };
        let values = match &self.values {
            Fractions::Exact(v) => {
                let mut acc: BTreeMap<String, BigRational> = BTreeMap::new();
                for (l, x) in self.labels.iter().zip(v) {
                    *acc.entry(signal(l)).or_insert_with(BigRational::zero) += x;
                }
                let (labels, vals): (Vec<_>, Vec<_>) = acc.into_iter().unzip();
                return OccupancyVector {
                    labels,
                    values: Fractions::Exact(vals),
                    horizon: self.horizon,
                };
            }
            Fractions::Float(v) => v,
        };
        let mut acc: BTreeMap<String, f64> = BTreeMap::new();
        for (l, x) in self.labels.iter().zip(values) {
            *acc.entry(signal(l)).or_insert(0.0) += x;
        }
        let (labels, vals): (Vec<_>, Vec<_>) = acc.into_iter().unzip();
        OccupancyVector {
            labels,
            values: Fractions::Float(vals),
            horizon: self.horizon,
        }
    }

    pub fn report(&self) -> OccupancyReport {
        OccupancyReport {
            horizon: self.horizon,
            entries: self
                .labels
                .iter()
                .zip(self.to_f64())
                .enumerate()
                .map(|(i, (label, value))| OccupancyEntry {
                    label: label.clone(),
                    value,
                    exact: self.exact().map(|v| v[i].to_string()),
                })
                .collect(),
        }
    }
}

/// Serializable view of an [`OccupancyVector`].
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct OccupancyReport {
    pub horizon: u64,
    pub entries: Vec<OccupancyEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct OccupancyEntry {
    pub label: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

pub(crate) fn require_unary(a: &Automaton) -> Result<()> {
    if a.is_unary() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "`{}` has {} input symbols; a unary machine is required",
            a.name(),
            a.inputs().len()
        )))
    }
}

/// Fraction of the length-`n` paths from the initial state that end in each
/// state. Exact big-integer counts up to [`EXACT_PATH_LIMIT`] steps; beyond
/// that the path-count vector is renormalized in floating point every step,
/// which leaves the ratios unchanged.
pub fn path_count_occupancy(a: &Automaton, n: u64) -> Result<OccupancyVector> {
    require_unary(a)?;
    let e = a.tick_symbol();
    let size = a.num_states();
    let labels = a.states().to_vec();
    if n <= EXACT_PATH_LIMIT {
        let mut v = vec![BigUint::zero(); size];
        v[a.initial().index()] = BigUint::from(1u8);
        for step in 0..n {
            let mut next = vec![BigUint::zero(); size];
            for q in a.state_ids() {
                if v[q.index()].is_zero() {
                    continue;
                }
                for r in a.successors(q, e) {
                    next[r.index()] += &v[q.index()];
                }
            }
            v = next;
            if v.iter().all(Zero::is_zero) {
                return Err(Error::Halted {
                    after: step,
                    partial: vec![],
                });
            }
        }
        let total: BigUint = v.iter().sum();
        let total = num_bigint::BigInt::from(total);
        let values = v
            .into_iter()
            .map(|c| BigRational::new(num_bigint::BigInt::from(c), total.clone()))
            .collect();
        return Ok(OccupancyVector {
            labels,
            values: Fractions::Exact(values),
            horizon: n,
        });
    }
    let mut v = vec![0.0f64; size];
    v[a.initial().index()] = 1.0;
    for step in 0..n {
        let mut next = vec![0.0; size];
        for q in a.state_ids() {
            let x = v[q.index()];
            if x == 0.0 {
                continue;
            }
            for r in a.successors(q, e) {
                next[r.index()] += x;
            }
        }
        let total: f64 = next.iter().sum();
        if total == 0.0 {
            return Err(Error::Halted {
                after: step,
                partial: vec![],
            });
        }
        v = next.into_iter().map(|x| x / total).collect();
    }
    Ok(OccupancyVector {
        labels,
        values: Fractions::Float(v),
        horizon: n,
    })
}

/// Visit fractions of one seeded random run of `steps` ticks, choosing
/// uniformly among successors. The initial state is not counted; each of
/// the `steps` states entered is.
pub fn monte_carlo_occupancy(a: &Automaton, steps: u64, seed: u64) -> Result<OccupancyVector> {
    require_unary(a)?;
    if steps == 0 {
        return Err(Error::Invalid("steps must be at least 1".into()));
    }
    let e = a.tick_symbol();
    let succ: Vec<Vec<usize>> = a
        .state_ids()
        .map(|q| a.successors(q, e).map(|r| r.index()).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; a.num_states()];
    let mut q = a.initial().index();
    for done in 0..steps {
        let row = &succ[q];
        q = match row.len() {
            0 => {
                let partial = a
                    .states()
                    .iter()
                    .zip(&counts)
                    .map(|(l, &c)| (l.clone(), if done == 0 { 0.0 } else { c as f64 / done as f64 }))
                    .collect();
                return Err(Error::Halted {
                    after: done,
                    partial,
                });
            }
            1 => row[0],
            n => row[rng.random_range(0..n)],
        };
        counts[q] += 1;
    }
    Ok(OccupancyVector {
        labels: a.states().to_vec(),
        values: Fractions::Float(counts.iter().map(|&c| c as f64 / steps as f64).collect()),
        horizon: steps,
    })
}

/// Exact occupancy of a deterministic unary machine over the cycle its run
/// from the initial state eventually repeats. States off the cycle get 0.
pub fn cycle_occupancy(a: &Automaton) -> Result<OccupancyVector> {
    require_unary(a)?;
    let e = a.tick_symbol();
    let mut first_seen = vec![usize::MAX; a.num_states()];
    let mut path = Vec::new();
    let mut q = a.initial();
    loop {
        if first_seen[q.index()] != usize::MAX {
            break;
        }
        first_seen[q.index()] = path.len();
        path.push(q);
        let mut succ = a.successors(q, e);
        q = match (succ.next(), succ.next()) {
            (Some(r), None) => r,
            (None, _) => {
                return Err(Error::Halted {
                    after: path.len() as u64 - 1,
                    partial: vec![],
                })
            }
            (Some(_), Some(_)) => return Err(Error::Nondeterministic(a.state_name(q).into())),
        };
    }
    let cycle = &path[first_seen[q.index()]..];
    let len = num_bigint::BigInt::from(cycle.len());
    let mut counts = vec![0usize; a.num_states()];
    for r in cycle {
        counts[r.index()] += 1;
    }
    Ok(OccupancyVector {
        labels: a.states().to_vec(),
        values: Fractions::Exact(
            counts
                .into_iter()
                .map(|c| BigRational::new(c.into(), len.clone()))
                .collect(),
        ),
        horizon: cycle.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::menagerie::{chain, labeled_wheel, looped_two_wheel, wheel};

    fn ratio(n: u64, d: u64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// All input words of length `n` on the unary tick are the same word, so
    /// enumerate nondeterministic choice sequences instead.
    fn enumerate_paths(a: &Automaton, n: usize) -> Vec<u64> {
        let mut counts = vec![0u64; a.num_states()];
        fn walk(a: &Automaton, q: usize, left: usize, counts: &mut [u64]) {
            if left == 0 {
                counts[q] += 1;
                return;
            }
            for r in a.successors(crate::machine::StateId(q), 0) {
                walk(a, r.index(), left - 1, counts);
            }
        }
        walk(a, a.initial().index(), n, &mut counts);
        counts
    }

    #[test]
    fn three_step_paths_match_enumeration() {
        let m = looped_two_wheel();
        let counts = enumerate_paths(&m, 3);
        assert_eq!(counts, vec![3, 2]);
        let occ = path_count_occupancy(&m, 3).unwrap();
        assert_eq!(occ.exact().unwrap(), &[ratio(3, 5), ratio(2, 5)]);
    }

    #[test]
    fn enumeration_agrees_up_to_fifteen_steps() {
        let m = looped_two_wheel();
        for n in 0..15 {
            let counts = enumerate_paths(&m, n);
            let total: u64 = counts.iter().sum();
            let occ = path_count_occupancy(&m, n as u64).unwrap();
            assert_eq!(occ.exact().unwrap()[0], ratio(counts[0], total));
        }
    }

    #[test]
    fn forty_steps_near_golden_ratio() {
        let occ = path_count_occupancy(&looped_two_wheel(), 40).unwrap();
        assert!((occ.get("q0").unwrap() - 0.61803).abs() < 1e-3);
    }

    #[test]
    fn float_regime_continues_exact_regime() {
        let m = looped_two_wheel();
        let exact = path_count_occupancy(&m, 200).unwrap().to_f64();
        let float = path_count_occupancy(&m, 201).unwrap();
        assert!(float.exact().is_none());
        assert!((exact[0] - float.to_f64()[0]).abs() < 1e-12);
    }

    #[test]
    fn deterministic_wheel_concentrates() {
        let occ = path_count_occupancy(&wheel(4), 7).unwrap();
        assert_eq!(occ.get("q3"), Some(1.0));
        assert_eq!(occ.get("q0"), Some(0.0));
    }

    #[test]
    fn halted_chain_reports_error() {
        assert!(matches!(
            path_count_occupancy(&chain(3), 5),
            Err(Error::Halted { after: 2, .. })
        ));
        assert!(matches!(
            monte_carlo_occupancy(&chain(3), 5, 1),
            Err(Error::Halted { after: 2, .. })
        ));
    }

    #[test]
    fn monte_carlo_exact_on_wheel() {
        let occ = monte_carlo_occupancy(&wheel(3), 300_000, 9).unwrap();
        assert!(occ.max_deviation(&[1.0 / 3.0; 3]) < 1e-5);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let m = looped_two_wheel();
        assert_eq!(
            monte_carlo_occupancy(&m, 1000, 42).unwrap(),
            monte_carlo_occupancy(&m, 1000, 42).unwrap()
        );
    }

    #[test]
    fn labeled_cycle_signal_fractions() {
        let m = labeled_wheel(&["1", "2", "3"], &[5, 3, 2]).unwrap();
        let sig = cycle_occupancy(&m).unwrap().by_signal(&m);
        assert_eq!(sig.labels, ["1", "2", "3"]);
        assert_eq!(sig.exact().unwrap(), &[ratio(1, 2), ratio(3, 10), ratio(1, 5)]);
    }

    #[test]
    fn duplicate_signal_sums() {
        let w = wheel(4);
        let m = w.with_outputs([("q0", "x"), ("q2", "x")]).unwrap();
        let sig = cycle_occupancy(&m).unwrap().by_signal(&m);
        assert_eq!(sig.get_exact("x"), Some(&ratio(1, 2)));
        assert_eq!(sig.get_exact("1"), Some(&ratio(1, 4)));
    }
}
