#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tdn_influence::tdn::Timestep;
use tdn_influence::{Edge, Interaction, Lifetime, NodeId, NodeSet, TdnGraph};

/// Plain adjacency-list reachability, sharing no code with the crate's
/// oracle.
#[derive(Default, Clone, Debug)]
pub struct RefGraph {
    out: HashMap<u64, Vec<u64>>,
    nodes: BTreeSet<u64>,
}

impl RefGraph {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut g = RefGraph::default();
        for (u, v) in pairs {
            g.out.entry(u).or_default().push(v);
            g.nodes.insert(u);
            g.nodes.insert(v);
        }
        g
    }

    /// Edges of `graph` alive now with at least `floor` steps left.
    pub fn alive(graph: &TdnGraph, floor: u32) -> Self {
        let now = graph.now();
        Self::from_pairs(
            graph
                .alive_edges()
                .filter(|e| e.interaction.remaining_at(now).is_none_or(|r| r >= floor as u64))
                .map(|e| (e.source().0, e.target().0)),
        )
    }

    pub fn nodes(&self) -> Vec<u64> {
        self.nodes.iter().copied().collect()
    }

    /// Everything reachable from `seeds`, the seeds included.
    pub fn reach(&self, seeds: &[u64]) -> HashSet<u64> {
        let mut seen: HashSet<u64> = seeds.iter().copied().collect();
        let mut stack: Vec<u64> = seeds.to_vec();
        while let Some(u) = stack.pop() {
            for &v in self.out.get(&u).into_iter().flatten() {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Seeds absent from the graph count for nothing.
    pub fn spread(&self, seeds: &[u64]) -> usize {
        let present: Vec<u64> = seeds.iter().copied().filter(|s| self.nodes.contains(s)).collect();
        self.reach(&present).len()
    }

    pub fn spread_of(&self, set: &NodeSet) -> usize {
        let seeds: Vec<u64> = set.iter().map(|n| n.0).collect();
        self.spread(&seeds)
    }

    /// Best value over all seed sets of size at most `k`.
    pub fn opt(&self, k: usize) -> usize {
        let nodes = self.nodes();
        let mut best = 0;
        let mut pick = Vec::new();
        self.enumerate(&nodes, 0, k, &mut pick, &mut best);
        best
    }

    fn enumerate(&self, nodes: &[u64], from: usize, k: usize, pick: &mut Vec<u64>, best: &mut usize) {
        *best = (*best).max(self.spread(pick));
        if pick.len() == k {
            return;
        }
        for i in from..nodes.len() {
            pick.push(nodes[i]);
            self.enumerate(nodes, i + 1, k, pick, best);
            pick.pop();
        }
    }
}

pub fn ids(nodes: &[u64]) -> NodeSet {
    nodes.iter().map(|&n| NodeId(n)).collect()
}

/// How the small random streams draw lifetimes.
#[derive(Clone, Copy, Debug)]
pub enum Draw {
    Infinite,
    Constant(u32),
    /// Geometric with success probability `p`, redrawn above `max`.
    Geometric(f64, u32),
    Uniform(u32),
}

impl Draw {
    pub fn sample(self, rng: &mut ChaCha8Rng) -> Lifetime {
        match self {
            Draw::Infinite => Lifetime::Infinite,
            Draw::Constant(w) => Lifetime::Finite(w),
            Draw::Uniform(max) => Lifetime::Finite(rng.gen_range(1..=max)),
            Draw::Geometric(p, max) => loop {
                let mut l = 1;
                while !rng.gen_bool(p) {
                    l += 1;
                }
                if l <= max {
                    break Lifetime::Finite(l);
                }
            },
        }
    }
}

/// Random batches: up to `per_step` interactions per step among `n` nodes,
/// some steps empty.
pub fn random_batches(rng: &mut ChaCha8Rng, n: u64, steps: usize, per_step: usize, draw: Draw) -> Vec<Vec<(u64, u64, Lifetime)>> {
    (0..steps)
        .map(|_| {
            let m = rng.gen_range(0..=per_step);
            (0..m)
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    let mut v = rng.gen_range(0..n - 1);
                    if v >= u {
                        v += 1;
                    }
                    (u, v, draw.sample(rng))
                })
                .collect()
        })
        .collect()
}

/// Inserts one batch at the graph's current time.
pub fn insert(graph: &mut TdnGraph, batch: &[(u64, u64, Lifetime)]) -> Vec<Edge> {
    let now: Timestep = graph.now();
    graph
        .insert_batch(
            batch
                .iter()
                .map(|&(u, v, l)| Interaction::new(u, v, now, l).unwrap()),
        )
        .unwrap()
}
