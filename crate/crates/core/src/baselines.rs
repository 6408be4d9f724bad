//! Recompute-from-scratch reference algorithms.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::oracle::{NodeSet, Oracle};
use crate::tdn::{GraphView, NodeId};

/// Plain greedy: `k` rounds, each adding the node of largest marginal gain
/// (smallest id on ties). Stops once no node adds anything.
pub fn greedy(view: &GraphView<'_>, oracle: &mut Oracle, k: usize) -> (NodeSet, usize) {
    let nodes = candidates(view);
    let mut cover = Coverage::new(view);
    let mut chosen = Vec::new();
    let mut buf = Vec::new();
    for _ in 0..k.min(nodes.len()) {
        let mut best: Option<(usize, u32)> = None;
        for &(_, ix) in &nodes {
            if chosen.contains(&ix) {
                continue;
            }
            oracle.tick();
            oracle.reach_of(view, ix, &mut buf);
            let gain = cover.gain(&buf);
            // nodes are sorted by id, so only a strict improvement wins
            if best.is_none_or(|(b, _)| gain > b) {
                best = Some((gain, ix));
            }
        }
        match best {
            Some((gain, ix)) if gain > 0 => {
                oracle.reach_of(view, ix, &mut buf);
                cover.add(&buf);
                chosen.push(ix);
            }
            _ => break,
        }
    }
    finish(view, chosen, cover.len)
}

#[derive(PartialEq, Eq)]
struct Stale {
    gain: usize,
    id: Reverse<NodeId>,
    ix: u32,
    round: usize,
}

impl Ord for Stale {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gain, self.id).cmp(&(other.gain, other.id))
    }
}

impl PartialOrd for Stale {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy with lazily re-evaluated gains. Same output as [`greedy`], never
/// more oracle calls.
pub fn lazy_greedy(view: &GraphView<'_>, oracle: &mut Oracle, k: usize) -> (NodeSet, usize) {
    let nodes = candidates(view);
    let mut cover = Coverage::new(view);
    let mut chosen = Vec::new();
    let mut buf = Vec::new();
    let mut heap = BinaryHeap::with_capacity(nodes.len());
    if k > 0 {
        for &(id, ix) in &nodes {
            oracle.tick();
            oracle.reach_of(view, ix, &mut buf);
            heap.push(Stale {
                gain: buf.len(),
                id: Reverse(id),
                ix,
                round: 0,
            });
        }
    }
    let mut round = 0;
    while chosen.len() < k {
        let Some(top) = heap.pop() else { break };
        oracle.reach_of(view, top.ix, &mut buf);
        if top.round == round {
            if top.gain == 0 {
                break;
            }
            cover.add(&buf);
            chosen.push(top.ix);
            round += 1;
        } else {
            oracle.tick();
            heap.push(Stale {
                gain: cover.gain(&buf),
                round,
                ..top
            });
        }
    }
    finish(view, chosen, cover.len)
}

/// `k` distinct nodes of the view drawn uniformly; all of them when `k`
/// exceeds the node count.
pub fn random_k(view: &GraphView<'_>, k: usize, seed: u64) -> NodeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = view.nodes();
    nodes.choose_multiple(&mut rng, k).copied().collect()
}

/// Present nodes as `(id, index)`, ascending by id.
fn candidates(view: &GraphView<'_>) -> Vec<(NodeId, u32)> {
    let graph = view.graph();
    view.nodes()
        .into_iter()
        .map(|id| (id, graph.node_index(id).expect("present node is indexed")))
        .collect()
}

fn finish(view: &GraphView<'_>, chosen: Vec<u32>, value: usize) -> (NodeSet, usize) {
    let graph = view.graph();
    (chosen.into_iter().map(|ix| graph.node_id(ix)).collect(), value)
}

struct Coverage {
    hit: Vec<bool>,
    len: usize,
}

impl Coverage {
    fn new(view: &GraphView<'_>) -> Self {
        Coverage {
            hit: vec![false; view.graph().node_capacity()],
            len: 0,
        }
    }

    fn gain(&self, nodes: &[u32]) -> usize {
        nodes.iter().filter(|&&n| !self.hit[n as usize]).count()
    }

    fn add(&mut self, nodes: &[u32]) {
        for &n in nodes {
            if !std::mem::replace(&mut self.hit[n as usize], true) {
                self.len += 1;
            }
        }
    }
}
