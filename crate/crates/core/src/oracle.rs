//! Influence spread by exact reachability, plus the call accounting every
//! algorithm is measured by.
//!
//! One *oracle call* is one evaluation of the spread function: `spread(S)`
//! or `spread(S ∪ {v}) - spread(S)`. The counter never decreases and keeps
//! update-side and query-side calls apart.

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tdn::{Edge, EdgeId, GraphView, NodeId};

/// Upper bound on the subsets [`Oracle::brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: NodeId) -> bool {
        self.0.insert(node)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ascending by id.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl FromIterator<u64> for NodeSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        NodeSet(iter.into_iter().map(NodeId).collect())
    }
}

impl Extend<NodeId> for NodeSet {
    fn extend<I: IntoIterator<Item = NodeId>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = NodeId;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, NodeId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("}")
    }
}

/// Which side of an algorithm an oracle call is attributed to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CallKind {
    /// Processing arrivals.
    #[default]
    Update,
    /// Producing an answer or comparing instance outputs.
    Query,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleCounter {
    pub update: u64,
    pub query: u64,
}

impl OracleCounter {
    pub fn total(&self) -> u64 {
        self.update + self.query
    }

    fn tick(&mut self, kind: CallKind) {
        match kind {
            CallKind::Update => self.update += 1,
            CallKind::Query => self.query += 1,
        }
    }
}

impl std::ops::Add for OracleCounter {
    type Output = OracleCounter;

    fn add(self, rhs: Self) -> Self {
        OracleCounter {
            update: self.update + rhs.update,
            query: self.query + rhs.query,
        }
    }
}

impl std::ops::Sub for OracleCounter {
    type Output = OracleCounter;

    fn sub(self, rhs: Self) -> Self {
        OracleCounter {
            update: self.update - rhs.update,
            query: self.query - rhs.query,
        }
    }
}

/// Whether a seed counts toward its own spread.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeedCounting {
    /// Every seed present in the graph reaches itself by the empty path.
    #[default]
    Inclusive,
    /// Only nodes at the end of a path of length at least one count.
    Exclusive,
}

/// Evaluates spread on graph views and counts the evaluations.
///
/// Owns its traversal scratch space, so each thread of evaluation should
/// use its own oracle; counters can be summed afterwards.
#[derive(Debug, Clone, Default)]
pub struct Oracle {
    counter: OracleCounter,
    kind: CallKind,
    seeds: SeedCounting,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl Oracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_seed_counting(seeds: SeedCounting) -> Self {
        Oracle {
            seeds,
            ..Self::default()
        }
    }

    pub fn seed_counting(&self) -> SeedCounting {
        self.seeds
    }

    pub fn counter(&self) -> OracleCounter {
        self.counter
    }

    pub fn calls(&self) -> u64 {
        self.counter.total()
    }

    pub fn kind(&self) -> CallKind {
        self.kind
    }

    /// Sets the attribution for subsequent calls and returns the previous one.
    pub fn set_kind(&mut self, kind: CallKind) -> CallKind {
        std::mem::replace(&mut self.kind, kind)
    }

    /// Runs `f` with calls attributed to `kind`.
    pub fn attributed<R>(&mut self, kind: CallKind, f: impl FnOnce(&mut Self) -> R) -> R {
        let prev = self.set_kind(kind);
        let out = f(self);
        self.set_kind(prev);
        out
    }

    /// `f_t(S)`: the number of distinct nodes reachable from `seeds`.
    /// Seeds absent from the view contribute nothing.
    pub fn spread<N: Borrow<NodeId>>(
        &mut self,
        view: &GraphView<'_>,
        seeds: impl IntoIterator<Item = N>,
    ) -> usize {
        self.tick();
        let seeds: Vec<u32> = seeds
            .into_iter()
            .filter_map(|n| view.graph().node_index(*n.borrow()))
            .collect();
        self.begin(view);
        self.flood(view, &seeds)
    }

    /// `f_t(base ∪ {v}) - f_t(base)` in one traversal seeded with the
    /// reachable set of `base`. One call.
    pub fn marginal_gain(&mut self, view: &GraphView<'_>, base: &NodeSet, v: NodeId) -> usize {
        self.tick();
        let Some(v) = view.graph().node_index(v) else {
            return 0;
        };
        let base: Vec<u32> = base
            .iter()
            .filter_map(|n| view.graph().node_index(n))
            .collect();
        self.begin(view);
        self.flood(view, &base);
        self.flood(view, &[v])
    }

    /// `V̄`: the nodes whose spread changed because `new_edges` were added
    /// to produce `view`. Not an oracle call.
    ///
    /// A new edge `(u, v)` changes nothing when `u` already reached `v`
    /// without the new edges. Otherwise it changes exactly the nodes that
    /// reach `u` in `view` and did not reach `v` before, so the result is a
    /// subset of the nodes reaching some new source.
    pub fn affected_nodes(&mut self, view: &GraphView<'_>, new_edges: &[Edge]) -> NodeSet {
        self.affected_ix(view, new_edges)
            .into_iter()
            .map(|ix| view.graph().node_id(ix))
            .collect()
    }

    /// Exact maximizer of spread over sets of at most `k` nodes of the view.
    /// Ties go to the lexicographically smallest set of ids.
    pub fn brute_force_opt(&mut self, view: &GraphView<'_>, k: usize) -> Result<(NodeSet, usize)> {
        let nodes = view.nodes();
        let size = k.min(nodes.len());
        if size == 0 {
            return Ok((NodeSet::new(), 0));
        }
        let subsets = binomial(nodes.len() as u128, size as u128, BRUTE_FORCE_LIMIT);
        if subsets > BRUTE_FORCE_LIMIT {
            return Err(Error::SearchTooLarge {
                subsets,
                limit: BRUTE_FORCE_LIMIT,
            });
        }

        // spread is monotone, so some optimum has exactly `size` members
        let mut pick: Vec<usize> = (0..size).collect();
        let mut best: Option<(Vec<usize>, usize)> = None;
        loop {
            let seeds: Vec<NodeId> = pick.iter().map(|&i| nodes[i]).collect();
            let value = self.spread(view, &seeds);
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((pick.clone(), value));
            }
            if !next_combination(&mut pick, nodes.len()) {
                break;
            }
        }
        let (pick, value) = best.expect("at least one subset");
        Ok((pick.into_iter().map(|i| nodes[i]).collect(), value))
    }

    pub(crate) fn tick(&mut self) {
        self.counter.tick(self.kind);
    }

    /// Dense-index form of [`affected_nodes`](Self::affected_nodes), sorted by id.
    pub(crate) fn affected_ix(&mut self, view: &GraphView<'_>, new_edges: &[Edge]) -> Vec<u32> {
        let graph = view.graph();
        let mut fed: Vec<&Edge> = new_edges.iter().filter(|e| view.contains_edge(e)).collect();
        if fed.is_empty() {
            return Vec::new();
        }
        fed.sort_unstable_by_key(|e| e.id);
        let first = fed[0].id.0;
        let mut is_new = vec![false; (fed[fed.len() - 1].id.0 - first + 1) as usize];
        for e in &fed {
            is_new[(e.id.0 - first) as usize] = true;
        }
        let old = |id: EdgeId| id.0 < first || !is_new.get((id.0 - first) as usize).copied().unwrap_or(false);

        let mut found = Vec::new();
        let mut taken = vec![false; graph.node_capacity()];
        for e in fed {
            let (Some(u), Some(v)) = (graph.node_index(e.source()), graph.node_index(e.target())) else {
                continue;
            };
            // who reached v without the new edges
            self.begin(view);
            self.queue.clear();
            self.visit(v);
            self.queue.push(v);
            let mut head = 0;
            let mut redundant = false;
            'rev: while head < self.queue.len() {
                let x = self.queue[head];
                head += 1;
                for (w, id) in view.in_links(x) {
                    if !old(id) {
                        continue;
                    }
                    if w == u {
                        redundant = true;
                        break 'rev;
                    }
                    if self.visit(w) {
                        self.queue.push(w);
                    }
                }
            }
            if redundant {
                continue;
            }

            // who reaches u now, stopping at the set above
            self.queue.clear();
            self.visit(u);
            self.queue.push(u);
            let mut head = 0;
            while head < self.queue.len() {
                let x = self.queue[head];
                head += 1;
                if !std::mem::replace(&mut taken[x as usize], true) {
                    found.push(x);
                }
                for w in view.predecessors(x) {
                    if self.visit(w) {
                        self.queue.push(w);
                    }
                }
            }
        }
        found.sort_unstable_by_key(|&ix| graph.node_id(ix));
        found
    }

    /// Writes the reachable set of a single node into `out`. Not counted;
    /// callers tick for the evaluation they are performing.
    pub(crate) fn reach_of(&mut self, view: &GraphView<'_>, v: u32, out: &mut Vec<u32>) {
        self.begin(view);
        let start = self.queue_seeds(view, &[v]);
        self.drain(view, start);
        out.clear();
        out.extend_from_slice(&self.queue);
    }

    fn begin(&mut self, view: &GraphView<'_>) {
        let n = view.graph().node_capacity();
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    fn visit(&mut self, ix: u32) -> bool {
        let s = &mut self.stamp[ix as usize];
        if *s == self.epoch {
            false
        } else {
            *s = self.epoch;
            true
        }
    }

    /// Continues the current traversal from `seeds`; returns how many nodes
    /// were newly reached.
    fn flood(&mut self, view: &GraphView<'_>, seeds: &[u32]) -> usize {
        self.queue.clear();
        let start = self.queue_seeds(view, seeds);
        self.drain(view, start);
        self.queue.len()
    }

    /// Pushes the initial frontier for `seeds` onto the (cleared) queue.
    fn queue_seeds(&mut self, view: &GraphView<'_>, seeds: &[u32]) -> usize {
        self.queue.clear();
        match self.seeds {
            SeedCounting::Inclusive => {
                for &s in seeds {
                    if view.is_present(s) && self.visit(s) {
                        self.queue.push(s);
                    }
                }
            }
            SeedCounting::Exclusive => {
                for &s in seeds {
                    for w in view.successors(s) {
                        if self.visit(w) {
                            self.queue.push(w);
                        }
                    }
                }
            }
        }
        0
    }

    fn drain(&mut self, view: &GraphView<'_>, mut head: usize) {
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for w in view.successors(u) {
                if self.visit(w) {
                    self.queue.push(w);
                }
            }
        }
    }
}

/// `n choose k`, saturating just above `cap`.
fn binomial(n: u128, k: u128, cap: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
