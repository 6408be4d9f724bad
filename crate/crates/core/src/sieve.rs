//! Threshold sieving over an addition-only node stream.
//!
//! A [`SieveState`] keeps the largest singleton spread seen so far, `Δ`, and
//! one candidate set per threshold `θ = (1+ε)^i / 2k` with
//! `(1+ε)^i ∈ [Δ, 2kΔ]`. Each batch of new edges yields the set of nodes whose
//! spread may have grown; every such node joins each candidate set that still
//! has room and in which its marginal gain reaches the threshold. The answer
//! is the best candidate set.
//!
//! The state only stays meaningful while the view it is fed against grows
//! monotonically, i.e. every edge that becomes visible is passed to
//! [`SieveState::feed`] exactly once. Candidate sets hold dense node indices
//! of the graph the instance is attached to.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::oracle::{NodeSet, Oracle, OracleCounter};
use crate::tdn::{Edge, EdgeId, GraphView, TdnGraph};

#[derive(Clone, Debug)]
struct Threshold {
    exponent: i32,
    members: Vec<u32>,
    /// Union of the members' reachable sets on the current view.
    cover: Cover,
}

/// Bookkeeping for one fed batch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatchStats {
    /// Number of affected nodes examined.
    pub affected: usize,
    /// Ladder size after the batch.
    pub thresholds: usize,
    pub calls: OracleCounter,
}

#[derive(Clone, Debug)]
pub struct SieveState {
    k: usize,
    epsilon: f64,
    delta: usize,
    ladder: Vec<Threshold>,
    processed: Option<Vec<EdgeId>>,
}

impl SieveState {
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Config("budget k must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(SieveState {
            k,
            epsilon,
            delta: 0,
            ladder: Vec::new(),
            processed: None,
        })
    }

    /// Records the id of every edge fed from now on. Clones inherit the log.
    pub fn track_processed(mut self) -> Self {
        self.processed.get_or_insert_with(Vec::new);
        self
    }

    pub fn processed_edges(&self) -> Option<&[EdgeId]> {
        self.processed.as_deref()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Largest singleton spread observed so far.
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Current thresholds, ascending.
    pub fn thresholds(&self) -> Vec<f64> {
        self.ladder.iter().map(|t| self.theta(t.exponent)).collect()
    }

    pub fn threshold_count(&self) -> usize {
        self.ladder.len()
    }

    /// `(θ, S_θ)` pairs, ascending in `θ`.
    pub fn candidates(&self, graph: &TdnGraph) -> Vec<(f64, NodeSet)> {
        self.ladder
            .iter()
            .map(|t| {
                (
                    self.theta(t.exponent),
                    t.members.iter().map(|&ix| graph.node_id(ix)).collect(),
                )
            })
            .collect()
    }

    /// Feeds newly visible edges: computes the affected nodes on `view` and
    /// sieves them.
    pub fn feed(&mut self, view: &GraphView<'_>, oracle: &mut Oracle, new_edges: &[Edge]) -> BatchStats {
        let affected = oracle.affected_ix(view, new_edges);
        self.sieve(view, oracle, new_edges, &affected)
    }

    /// Sieves an explicitly supplied affected set. `affected` must contain
    /// every node whose spread changed with `new_edges`.
    pub fn process_batch(
        &mut self,
        view: &GraphView<'_>,
        oracle: &mut Oracle,
        new_edges: &[Edge],
        affected: &NodeSet,
    ) -> BatchStats {
        let graph = view.graph();
        let affected: Vec<u32> = affected.iter().filter_map(|n| graph.node_index(n)).collect();
        self.sieve(view, oracle, new_edges, &affected)
    }

    /// The best candidate set and its spread on the view of the last feed.
    /// `graph` only translates node indices back to ids.
    pub fn current_solution(&self, graph: &TdnGraph) -> (NodeSet, usize) {
        match self.best() {
            Some(t) => (
                t.members.iter().map(|&ix| graph.node_id(ix)).collect(),
                t.cover.len,
            ),
            None => (NodeSet::new(), 0),
        }
    }

    /// Value of [`current_solution`](Self::current_solution) without
    /// materializing the set.
    pub fn output_value(&self) -> usize {
        self.best().map_or(0, |t| t.cover.len)
    }

    fn theta(&self, exponent: i32) -> f64 {
        (1.0 + self.epsilon).powi(exponent) / (2 * self.k) as f64
    }

    fn best(&self) -> Option<&Threshold> {
        let mut best: Option<&Threshold> = None;
        for t in &self.ladder {
            // ties stay with the smaller threshold
            if best.is_none_or(|b| t.cover.len > b.cover.len) {
                best = Some(t);
            }
        }
        best
    }

    fn sieve(&mut self, view: &GraphView<'_>, oracle: &mut Oracle, new_edges: &[Edge], affected: &[u32]) -> BatchStats {
        if let Some(log) = self.processed.as_mut() {
            log.extend(new_edges.iter().filter(|e| view.contains_edge(e)).map(|e| e.id));
        }
        let before = oracle.counter();
        if affected.is_empty() {
            return BatchStats {
                affected: 0,
                thresholds: self.ladder.len(),
                calls: OracleCounter::default(),
            };
        }

        // singleton spreads, which also refresh Δ
        let mut reach = ReachArena::default();
        let mut buf = Vec::new();
        for &v in affected {
            oracle.tick();
            oracle.reach_of(view, v, &mut buf);
            reach.push(&buf);
        }
        let batch_max = (0..affected.len()).map(|i| reach.get(i).len()).max().unwrap_or(0);
        self.delta = self.delta.max(batch_max);
        self.rebuild_ladder();

        // a member's reach only grows, and unaffected members keep theirs
        let slot: HashMap<u32, usize> = affected.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for t in &mut self.ladder {
            for m in &t.members {
                if let Some(&i) = slot.get(m) {
                    t.cover.add(reach.get(i));
                }
            }
        }

        for (i, &v) in affected.iter().enumerate() {
            let rv = reach.get(i);
            let single = rv.len();
            for t in &mut self.ladder {
                if t.members.len() >= self.k || t.members.contains(&v) {
                    continue;
                }
                let theta = (1.0 + self.epsilon).powi(t.exponent) / (2 * self.k) as f64;
                // δ_S(v) <= f({v}) by submodularity
                if (single as f64) < theta {
                    continue;
                }
                let gain = if t.members.is_empty() {
                    single
                } else {
                    oracle.tick();
                    t.cover.gain(rv)
                };
                if gain as f64 >= theta {
                    t.members.push(v);
                    t.cover.add(rv);
                }
            }
        }

        BatchStats {
            affected: affected.len(),
            thresholds: self.ladder.len(),
            calls: oracle.counter() - before,
        }
    }

    /// Brings the ladder in line with Δ: thresholds that fall out of range
    /// are dropped along with their sets, new ones start empty.
    fn rebuild_ladder(&mut self) {
        let Some((lo, hi)) = ladder_exponents(self.delta, self.k, self.epsilon) else {
            return;
        };
        let mut kept = std::mem::take(&mut self.ladder)
            .into_iter()
            .filter(|t| (lo..=hi).contains(&t.exponent))
            .peekable();
        let mut ladder = Vec::with_capacity((hi - lo + 1) as usize);
        for exponent in lo..=hi {
            match kept.peek() {
                Some(t) if t.exponent == exponent => ladder.push(kept.next().unwrap()),
                _ => ladder.push(Threshold {
                    exponent,
                    members: Vec::new(),
                    cover: Cover::default(),
                }),
            }
        }
        self.ladder = ladder;
    }
}

/// Exponents `i` with `(1+ε)^i ∈ [Δ, 2kΔ]`, closed at both ends.
pub(crate) fn ladder_exponents(delta: usize, k: usize, epsilon: f64) -> Option<(i32, i32)> {
    if delta == 0 {
        return None;
    }
    let base = 1.0 + epsilon;
    let lo = delta as f64;
    let hi = 2.0 * k as f64 * lo;
    let mut min = (lo.ln() / base.ln()).ceil() as i32;
    while base.powi(min - 1) >= lo {
        min -= 1;
    }
    while base.powi(min) < lo {
        min += 1;
    }
    let mut max = (hi.ln() / base.ln()).floor() as i32;
    while base.powi(max + 1) <= hi {
        max += 1;
    }
    while base.powi(max) > hi {
        max -= 1;
    }
    Some((min, max))
}

/// Reachable sets of the affected nodes, stored back to back.
#[derive(Default)]
struct ReachArena {
    nodes: Vec<u32>,
    ends: Vec<usize>,
}

impl ReachArena {
    fn push(&mut self, set: &[u32]) {
        self.nodes.extend_from_slice(set);
        self.ends.push(self.nodes.len());
    }

    fn get(&self, i: usize) -> &[u32] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.nodes[start..self.ends[i]]
    }
}

/// Nodes reached by a candidate set, as a bitmap.
#[derive(Clone, Debug, Default)]
struct Cover {
    bits: Vec<u64>,
    len: usize,
}

impl Cover {
    fn add(&mut self, nodes: &[u32]) {
        for &n in nodes {
            let (w, b) = (n as usize / 64, n % 64);
            if w >= self.bits.len() {
                self.bits.resize(w + 1, 0);
            }
            if self.bits[w] & (1 << b) == 0 {
                self.bits[w] |= 1 << b;
                self.len += 1;
            }
        }
    }

    fn gain(&self, nodes: &[u32]) -> usize {
        nodes
            .iter()
            .filter(|&&n| self.bits.get(n as usize / 64).is_none_or(|w| w & (1 << (n % 64)) == 0))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tdn::{Interaction, Lifetime, NodeId};

    fn adn_edges(g: &mut TdnGraph, edges: &[(u64, u64)]) -> Vec<Edge> {
        let now = g.now();
        g.insert_batch(
            edges
                .iter()
                .map(|&(u, v)| Interaction::new(u, v, now, Lifetime::Infinite).unwrap()),
        )
        .unwrap()
    }

    /// Independent enumeration of the ladder.
    fn ladder_by_scan(delta: f64, k: usize, eps: f64) -> Vec<i32> {
        (-200..400)
            .filter(|&i| {
                let x = (1.0 + eps).powf(i as f64);
                x >= delta && x <= 2.0 * k as f64 * delta
            })
            .collect()
    }

    #[test]
    fn new_sieve_validates_parameters() {
        let s = SieveState::new(10, 0.1).unwrap();
        assert_eq!(s.delta(), 0);
        assert!(s.thresholds().is_empty());
        assert!(SieveState::new(0, 0.1).is_err());
        assert!(SieveState::new(1, 0.0).is_err());
        assert!(SieveState::new(1, 1.0).is_err());
    }

    #[test]
    fn ladder_for_delta_four() {
        // frozen from the scan: i = 15..=29
        assert_eq!(ladder_by_scan(4.0, 2, 0.1), (15..=29).collect::<Vec<_>>());
        assert_eq!(ladder_exponents(4, 2, 0.1), Some((15, 29)));
    }

    #[test]
    fn ladder_matches_scan_across_parameters() {
        for delta in [1, 2, 3, 7, 12, 100, 4096] {
            for k in [1, 2, 3, 10] {
                for eps in [0.05, 0.1, 0.2, 0.3, 0.5] {
                    let scan = ladder_by_scan(delta as f64, k, eps);
                    let (lo, hi) = ladder_exponents(delta, k, eps).unwrap();
                    assert_eq!(scan, (lo..=hi).collect::<Vec<_>>(), "Δ={delta} k={k} ε={eps}");
                }
            }
        }
    }

    #[test]
    fn single_edge_trace() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(1, 0.1).unwrap();
        let new = adn_edges(&mut g, &[(1, 2)]);
        s.feed(&g.view(), &mut o, &new);
        assert_eq!(s.delta(), 2);
        // every threshold is at most Δ = f({u}), so u lands everywhere
        for (_, set) in s.candidates(&g) {
            assert_eq!(set.to_vec(), vec![NodeId(1)]);
        }
        assert_eq!(s.current_solution(&g).1, 2);
    }

    #[test]
    fn empty_affected_leaves_state_alone() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(2, 0.1).unwrap();
        let new = adn_edges(&mut g, &[(1, 2), (2, 3)]);
        s.feed(&g.view(), &mut o, &new);
        let before = (s.delta(), s.candidates(&g));
        let calls = o.calls();
        let stats = s.process_batch(&g.view(), &mut o, &[], &NodeSet::new());
        assert_eq!(stats.affected, 0);
        assert_eq!(before, (s.delta(), s.candidates(&g)));
        assert_eq!(o.calls(), calls);
    }

    #[test]
    fn repeated_node_is_examined_again() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(2, 0.1).unwrap();
        let first = adn_edges(&mut g, &[(1, 2)]);
        let a = s.feed(&g.view(), &mut o, &first);
        g.advance_time();
        let second = adn_edges(&mut g, &[(1, 3)]);
        let b = s.feed(&g.view(), &mut o, &second);
        assert_eq!((a.affected, b.affected), (1, 1));
        assert_eq!(s.delta(), 3);
    }

    #[test]
    fn member_growth_is_tracked_without_query_calls() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(2, 0.1).unwrap();
        let new = adn_edges(&mut g, &[(1, 2), (1, 3)]);
        s.feed(&g.view(), &mut o, &new);
        assert_eq!(s.current_solution(&g), ([1u64].into_iter().collect(), 3));
        g.advance_time();
        // 3 -> 4 grows the reach of members 1 and 3 alike
        let new = adn_edges(&mut g, &[(3, 4), (4, 5)]);
        s.feed(&g.view(), &mut o, &new);
        let (set, value) = s.current_solution(&g);
        assert_eq!(value, Oracle::new().spread(&g.view(), &set));
        assert!(value >= 5);
        assert_eq!(o.counter().query, 0);
    }

    #[test]
    fn example_stream_meets_half_guarantee() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(2, 0.1).unwrap();
        let new = adn_edges(&mut g, &[(1, 2), (1, 3), (1, 4), (5, 3), (6, 4), (6, 7)]);
        s.feed(&g.view(), &mut o, &new);
        let (_, value) = s.current_solution(&g);
        assert!(value >= 3, "value {value}");
    }

    #[test]
    fn clone_is_deep_and_free() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(2, 0.2).unwrap();
        let empty = s.clone();
        assert_eq!(empty.delta(), 0);
        assert!(empty.thresholds().is_empty());

        let new = adn_edges(&mut g, &[(1, 2)]);
        s.feed(&g.view(), &mut o, &new);
        let calls = o.calls();
        let copy = s.clone();
        assert_eq!(o.calls(), calls);

        g.advance_time();
        let new = adn_edges(&mut g, &[(3, 4), (3, 5), (3, 6)]);
        s.feed(&g.view(), &mut o, &new);
        assert_ne!(copy.delta(), s.delta());
        assert!(copy
            .candidates(&g)
            .iter()
            .all(|(_, set)| !set.contains(NodeId(3))));
    }

    #[test]
    fn dropped_thresholds_lose_their_sets() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(1, 0.5).unwrap();
        let new = adn_edges(&mut g, &[(1, 2)]);
        s.feed(&g.view(), &mut o, &new);
        let low = s.thresholds()[0];
        g.advance_time();
        let star: Vec<(u64, u64)> = (10..30).map(|v| (9, v)).collect();
        let new = adn_edges(&mut g, &star);
        s.feed(&g.view(), &mut o, &new);
        assert!(s.thresholds()[0] > low);
        for (_, set) in s.candidates(&g) {
            assert!(!set.contains(NodeId(1)));
        }
    }

    #[test]
    fn processed_log_follows_feeds() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut s = SieveState::new(1, 0.1).unwrap().track_processed();
        let new = adn_edges(&mut g, &[(1, 2), (3, 4)]);
        s.feed(&g.view(), &mut o, &new);
        assert_eq!(s.processed_edges().unwrap(), &[EdgeId(0), EdgeId(1)]);
    }
}
