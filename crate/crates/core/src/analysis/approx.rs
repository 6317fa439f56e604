use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::machine::{Automaton, Constraints};
use crate::menagerie::labeled_wheel;

/// A distribution over a finite set of named outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDistribution {
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(outcomes: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != probs.len() {
            return Err(Error::Distribution(
                "need one probability per outcome and at least one outcome".into(),
            ));
        }
        if outcomes.iter().collect::<BTreeSet<_>>().len() != outcomes.len() {
            return Err(Error::Distribution("outcomes must be distinct".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Distribution("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { outcomes, probs })
    }

    /// Outcomes named `1`, `2`, ... in order.
    pub fn numbered(probs: Vec<f64>) -> Result<Self> {
        let outcomes = (1..=probs.len()).map(|i| i.to_string()).collect();
        Self::new(outcomes, probs)
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone)]
pub struct Approximation {
    /// Labeled wheel whose per-cycle signal occupancy approximates the distribution.
    pub machine: Automaton,
    pub size: usize,
    /// States carrying each outcome, in outcome order.
    pub counts: Vec<usize>,
    pub max_deviation: f64,
}

/// Largest-remainder apportionment of `k` states; ties go to the earlier outcome.
fn apportion(probs: &[f64], k: usize) -> Vec<usize> {
    let scaled: Vec<f64> = probs.iter().map(|p| p * k as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = scaled[i] - scaled[i].floor();
        let rj = scaled[j] - scaled[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for &i in order.iter().take(k.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn deviation(probs: &[f64], counts: &[usize], k: usize) -> f64 {
    probs
        .iter()
        .zip(counts)
        .map(|(p, &n)| (n as f64 / k as f64 - p).abs())
        .fold(0.0, f64::max)
}

/// Smallest labeled wheel, scanning sizes from the number of outcomes up to
/// the state limit, whose signal shares are all within `epsilon`.
pub fn approximate_distribution(
    d: &FiniteDistribution,
    epsilon: f64,
    c: &Constraints,
) -> Result<Approximation> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    let mut best = f64::INFINITY;
    for k in d.outcomes.len()..=c.max_states {
        let counts = apportion(&d.probs, k);
        let dev = deviation(&d.probs, &counts, k);
        best = best.min(dev);
        if dev <= epsilon {
            let present: Vec<(&str, usize)> = d
                .outcomes
                .iter()
                .zip(&counts)
                .filter(|(_, &n)| n > 0)
                .map(|(o, &n)| (o.as_str(), n))
                .collect();
            let (signals, ns): (Vec<&str>, Vec<usize>) = present.into_iter().unzip();
            let machine = labeled_wheel(&signals, &ns)?;
            return Ok(Approximation {
                machine,
                size: k,
                counts,
                max_deviation: dev,
            });
        }
    }
    Err(Error::Infeasible {
        requested: epsilon,
        best,
        max_states: c.max_states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_three_two() {
        let d = FiniteDistribution::numbered(vec![0.5, 0.3, 0.2]).unwrap();
        let a = approximate_distribution(&d, 0.01, &Constraints::default()).unwrap();
        assert_eq!(a.size, 10);
        assert_eq!(a.counts, vec![5, 3, 2]);
        assert!(a.max_deviation < 1e-15);
    }

    #[test]
    fn point_mass_is_one_state() {
        let d = FiniteDistribution::new(vec!["heads".into()], vec![1.0]).unwrap();
        let a = approximate_distribution(&d, 0.5, &Constraints::default()).unwrap();
        assert_eq!(a.size, 1);
        assert_eq!(a.machine.output(a.machine.initial()), "heads");
    }

    #[test]
    fn thirds_are_exact_at_three() {
        let d = FiniteDistribution::numbered(vec![1.0 / 3.0; 3]).unwrap();
        let a = approximate_distribution(&d, 1e-9, &Constraints::default()).unwrap();
        assert_eq!(a.size, 3);
    }

    #[test]
    fn bad_distributions() {
        assert!(FiniteDistribution::numbered(vec![0.5, 0.4]).is_err());
        assert!(FiniteDistribution::numbered(vec![1.5, -0.5]).is_err());
        assert!(FiniteDistribution::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        let d = FiniteDistribution::numbered(vec![1.0]).unwrap();
        assert!(approximate_distribution(&d, 0.0, &Constraints::default()).is_err());
    }

    #[test]
    fn apportion_fills_exactly() {
        assert_eq!(apportion(&[0.5, 0.3, 0.2], 3), vec![1, 1, 1]);
        assert_eq!(apportion(&[0.5, 0.5], 3), vec![2, 1]);
    }
}
