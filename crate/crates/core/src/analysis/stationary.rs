use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::occupancy::{require_unary, Fractions, OccupancyVector};
use crate::error::{Error, Result};
use crate::machine::Automaton;

const TOLERANCE: f64 = 1e-12;
const MAX_MATVECS: usize = 5_000_000;

/// Row-stochastic view of a unary machine: each successor of a state is
/// taken with equal probability.
struct Chain {
    succ: Vec<Vec<usize>>,
}

impl Chain {
    fn new(a: &Automaton) -> Self {
        let e = a.tick_symbol();
        Self {
            succ: a
                .state_ids()
                .map(|q| a.successors(q, e).map(|r| r.index()).collect())
                .collect(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (p, row) in self.succ.iter().enumerate() {
            if x[p] == 0.0 {
                continue;
            }
            let w = x[p] / row.len() as f64;
            for &q in row {
                y[q] += w;
            }
        }
        y
    }

    fn closed_classes(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.succ.len()).map(|_| g.add_node(())).collect();
        for (p, row) in self.succ.iter().enumerate() {
            for &q in row {
                g.add_edge(nodes[p], nodes[q], ());
            }
        }
        let mut closed = Vec::new();
        for scc in tarjan_scc(&g) {
            let members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            let leaves = members
                .iter()
                .any(|&p| self.succ[p].iter().any(|q| !members.contains(q)));
            if !leaves {
                let mut m = members;
                m.sort_unstable();
                closed.push(m);
            }
        }
        closed.sort();
        closed
    }

    /// Period of an irreducible class: gcd over edges of `level(p) + 1 - level(q)`.
    fn period(&self, class: &[usize]) -> usize {
        let mut level = vec![usize::MAX; self.succ.len()];
        let mut queue = std::collections::VecDeque::from([class[0]]);
        level[class[0]] = 0;
        let mut g = 0usize;
        while let Some(p) = queue.pop_front() {
            for &q in &self.succ[p] {
                if level[q] == usize::MAX {
                    level[q] = level[p] + 1;
                    queue.push_back(q);
                } else {
                    g = num_integer::gcd(g, (level[p] + 1).abs_diff(level[q]));
                }
            }
        }
        g.max(1)
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Stationary distribution of the uniform-choice Markov chain of a complete
/// unary machine. Iterates the `d`-step chain (`d` the period of the unique
/// closed class) to convergence and averages `d` consecutive iterates, which
/// is the Cesàro limit for periodic chains.
pub fn stationary_distribution(a: &Automaton) -> Result<OccupancyVector> {
    require_unary(a)?;
    if !a.is_complete() {
        return Err(Error::Unsupported(format!(
            "`{}` is partial; the uniform-choice chain needs a successor everywhere",
            a.name()
        )));
    }
    let chain = Chain::new(a);
    let classes = chain.closed_classes();
    if classes.len() != 1 {
        return Err(Error::Ambiguous(
            classes
                .iter()
                .map(|c| c.iter().map(|&i| a.states()[i].clone()).collect())
                .collect(),
        ));
    }
    let class = &classes[0];
    let d = chain.period(class);
    let n = a.num_states();
    let mut x = vec![0.0; n];
    for &i in class {
        x[i] = 1.0 / class.len() as f64;
    }
    let mut spent = 0usize;
    let mut iters = 0u64;
    loop {
        let mut y = x.clone();
        for _ in 0..d {
            y = chain.apply(&y);
        }
        spent += d;
        iters += 1;
        let delta = l1(&x, &y);
        x = y;
        if delta < TOLERANCE * 0.1 {
            break;
        }
        if spent > MAX_MATVECS {
            return Err(Error::NoConvergence(delta));
        }
    }
    let mut avg = vec![0.0; n];
    let mut cur = x;
    for _ in 0..d {
        for (s, v) in avg.iter_mut().zip(&cur) {
            *s += v / d as f64;
        }
        cur = chain.apply(&cur);
    }
    let total: f64 = avg.iter().sum();
    avg.iter_mut().for_each(|v| *v /= total);
    let residual = l1(&chain.apply(&avg), &avg);
    if residual >= TOLERANCE {
        return Err(Error::NoConvergence(residual));
    }
    Ok(OccupancyVector {
        labels: a.states().to_vec(),
        values: Fractions::Float(avg),
        horizon: iters * d as u64,
    })
}

/// `max |vP - v|` for the uniform-choice chain of `a`.
pub fn stationary_residual(a: &Automaton, v: &[f64]) -> f64 {
    let y = Chain::new(a).apply(v);
    y.iter().zip(v).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
