use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::machine::{Automaton, StateId};

/// Limits for [`synchronizing_word`].
#[derive(Debug, Clone, Copy)]
pub struct SyncOptions {
    /// Machines up to this many states get an exact breadth-first search
    /// over state subsets.
    pub exact_limit: usize,
    /// Most subsets (or state pairs, in the greedy search) explored.
    pub budget: usize,
}

impl Default for SyncOptions {
    fn default() -> Self {
        Self {
            exact_limit: 20,
            budget: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyncWord {
    pub word: Vec<String>,
    /// The single state every state is driven to.
    pub target: String,
    pub reaches_initial: bool,
    /// False when the greedy pair-merging search produced the word.
    pub shortest: bool,
}

fn table(a: &Automaton) -> Result<Vec<Vec<usize>>> {
    if !a.is_deterministic() || !a.is_complete() {
        return Err(Error::Unsupported(format!(
            "`{}` must be deterministic and complete",
            a.name()
        )));
    }
    Ok(a.state_ids()
        .map(|q| {
            (0..a.inputs().len())
                .map(|s| a.successors(q, s).next().unwrap().index())
                .collect()
        })
        .collect())
}

/// A word that sends every state to one common state, or `None` when the
/// machine is not synchronizing.
pub fn synchronizing_word(a: &Automaton) -> Result<Option<SyncWord>> {
    synchronizing_word_with(a, SyncOptions::default())
}

pub fn synchronizing_word_with(a: &Automaton, opts: SyncOptions) -> Result<Option<SyncWord>> {
    let delta = table(a)?;
    let found = if a.num_states() <= opts.exact_limit.min(31) {
        subset_search(&delta, opts.budget)?.map(|w| (w, true))
    } else {
        greedy_search(&delta, opts.budget)?.map(|w| (w, false))
    };
    Ok(found.map(|(word, shortest)| {
        let target = word
            .iter()
            .fold(0usize, |q, &s| delta[q][s]);
        SyncWord {
            word: word.iter().map(|&s| a.inputs()[s].clone()).collect(),
            target: a.state_name(StateId(target)).to_string(),
            reaches_initial: target == a.initial().index(),
            shortest,
        }
    }))
}

fn subset_search(delta: &[Vec<usize>], budget: usize) -> Result<Option<Vec<usize>>> {
    let n = delta.len();
    let symbols = delta[0].len();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let image = |set: u32, s: usize| {
        let mut out = 0u32;
        let mut rest = set;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << delta[q][s];
        }
        out
    };
    let mut parent: HashMap<u32, (u32, usize)> = HashMap::new();
    let mut queue = VecDeque::from([full]);
    parent.insert(full, (full, usize::MAX));
    while let Some(set) = queue.pop_front() {
        if set.count_ones() == 1 {
            let mut word = Vec::new();
            let mut cur = set;
            while cur != full {
                let (prev, s) = parent[&cur];
                word.push(s);
                cur = prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for s in 0..symbols {
            let next = image(set, s);
            if !parent.contains_key(&next) {
                if parent.len() >= budget {
                    return Err(Error::Budget(budget));
                }
                parent.insert(next, (set, s));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

/// Shortest word merging states `p` and `q`, by breadth-first search over pairs.
fn merge_pair(delta: &[Vec<usize>], p: usize, q: usize, budget: usize) -> Result<Option<Vec<usize>>> {
    let n = delta.len();
    if n.saturating_mul(n) > budget {
        return Err(Error::Budget(budget));
    }
    let key = |a: usize, b: usize| if a < b { a * n + b } else { b * n + a };
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let start = key(p, q);
    parent.insert(start, (start, usize::MAX));
    let mut queue = VecDeque::from([(p, q)]);
    while let Some((a, b)) = queue.pop_front() {
        if a == b {
            let mut word = Vec::new();
            let mut cur = key(a, b);
            while cur != start {
                let (prev, s) = parent[&cur];
                word.push(s);
                cur = prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for (s, _) in delta[a].iter().enumerate() {
            let (x, y) = (delta[a][s], delta[b][s]);
            let k = key(x, y);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(k) {
                e.insert((key(a, b), s));
                queue.push_back((x, y));
            }
        }
    }
    Ok(None)
}

fn greedy_search(delta: &[Vec<usize>], budget: usize) -> Result<Option<Vec<usize>>> {
    let n = delta.len();
    let mut current: Vec<usize> = (0..n).collect();
    let mut word = Vec::new();
    while current.len() > 1 {
        let Some(w) = merge_pair(delta, current[0], current[1], budget)? else {
            return Ok(None);
        };
        for q in current.iter_mut() {
            *q = w.iter().fold(*q, |r, &s| delta[r][s]);
        }
        current.sort_unstable();
        current.dedup();
        word.extend(w);
    }
    Ok(Some(word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::AutomatonBuilder;
    use crate::menagerie::{build, wheel, MachineSpec};

    /// Černý's automaton C_n: `a` rotates, `b` merges state n-1 into 0.
    fn cerny(n: usize) -> Automaton {
        let mut b = AutomatonBuilder::new(format!("C_{n}"))
            .states((0..n).map(|i| format!("{i}")))
            .inputs(["a", "b"]);
        for i in 0..n {
            b = b.edge(i.to_string(), "a", ((i + 1) % n).to_string());
            let t = if i == n - 1 { 0 } else { i };
            b = b.edge(i.to_string(), "b", t.to_string());
        }
        b.build().unwrap()
    }

    fn check(a: &Automaton, w: &SyncWord) {
        let ends: std::collections::BTreeSet<String> = a
            .state_ids()
            .map(|q| {
                let mut cur = q;
                for s in &w.word {
                    cur = a.step(cur, s).unwrap()[0].0;
                }
                a.state_name(cur).to_string()
            })
            .collect();
        assert_eq!(ends.len(), 1);
        assert_eq!(ends.first().unwrap(), &w.target);
    }

    #[test]
    fn pure_cycles_never_synchronize() {
        for k in 2..8 {
            assert_eq!(synchronizing_word(&wheel(k)).unwrap(), None);
        }
    }

    #[test]
    fn wire_collapses_in_one_symbol() {
        let d = build(&"wire:xy".parse::<MachineSpec>().unwrap()).unwrap();
        let w = synchronizing_word(&d).unwrap().unwrap();
        assert_eq!(w.word, ["x"]);
        assert_eq!(w.target, "w:x");
        assert!(!w.reaches_initial);
        assert!(w.shortest);
    }

    #[test]
    fn cerny_words_meet_the_bound() {
        for n in 2..8 {
            let a = cerny(n);
            let w = synchronizing_word(&a).unwrap().unwrap();
            check(&a, &w);
            assert_eq!(w.word.len(), (n - 1) * (n - 1), "n={n}");
        }
    }

    #[test]
    fn greedy_agrees_on_synchronizability() {
        let opts = SyncOptions {
            exact_limit: 0,
            ..SyncOptions::default()
        };
        for n in 2..9 {
            let a = cerny(n);
            let w = synchronizing_word_with(&a, opts).unwrap().unwrap();
            assert!(!w.shortest);
            check(&a, &w);
        }
        assert_eq!(synchronizing_word_with(&wheel(5), opts).unwrap(), None);
    }

    #[test]
    fn single_state_needs_empty_word() {
        let w = synchronizing_word(&wheel(1)).unwrap().unwrap();
        assert!(w.word.is_empty());
        assert!(w.reaches_initial);
    }

    #[test]
    fn requires_complete_deterministic() {
        assert!(synchronizing_word(&crate::menagerie::chain(3)).is_err());
        assert!(synchronizing_word(&crate::menagerie::looped_two_wheel()).is_err());
    }
}
