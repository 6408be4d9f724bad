//! A histogram of sieve instances indexed by remaining lifetime.
//!
//! Instead of one instance per possible lifetime, only the indices in `x_t`
//! carry an instance. An arrival of lifetime `l` that has no instance of its
//! own gets either a fresh one (nothing alive outlives it) or a copy of the
//! next instance up, brought level by the alive edges it is missing. After
//! every such insertion, instances whose output is sandwiched between two
//! outputs within a `(1-ε)` factor are dropped.
//!
//! Instance `A_x` has always consumed exactly the alive edges whose remaining
//! lifetime is at least `x`, so it evaluates spread on
//! [`TdnGraph::view_with_min_remaining`]`(x)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::oracle::{CallKind, NodeSet, Oracle};
use crate::sieve::SieveState;
use crate::tdn::{Edge, EdgeId, Lifetime, TdnGraph, Timestep};

/// Stable identity of an instance; survives index relabeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId(pub u64);

#[derive(Clone, Debug)]
struct Entry {
    index: u32,
    id: InstanceId,
    sieve: SieveState,
    g: usize,
}

/// Surviving indices of one pruning pass with the outputs the pass used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassRecord {
    pub time: Timestep,
    pub indices: Vec<u32>,
    pub g: Vec<usize>,
    pub removed: Vec<u32>,
}

/// Why two neighbouring indices may coexist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairStatus {
    /// No alive edge has remaining lifetime strictly between them.
    NoEdgesBetween,
    /// Their outputs were within a `(1-ε)` factor at `since`, and nothing
    /// was inserted between them afterwards.
    CloseSince { since: Timestep },
    /// Closeness was recorded but has dropped out of the bounded log.
    Forgotten,
    /// Neither condition could be established.
    Unexplained,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacentPair {
    pub lower: u32,
    pub upper: u32,
    pub status: PairStatus,
}

/// What [`HistApprox::query`] returns besides the answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub solution: NodeSet,
    /// Spread of `solution` on `G_t`.
    pub value: usize,
    /// Output of the head instance on its own view.
    pub head_value: usize,
}

const DEFAULT_LOG_CAPACITY: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct HistApprox {
    k: usize,
    epsilon: f64,
    max_lifetime: u32,
    entries: Vec<Entry>,
    refine: bool,
    track: bool,
    next_id: u64,
    close: HashMap<(InstanceId, InstanceId), Timestep>,
    close_order: VecDeque<(InstanceId, InstanceId)>,
    forgotten: HashSet<(InstanceId, InstanceId)>,
    log_capacity: usize,
    passes: Option<Vec<PassRecord>>,
    last_affected: usize,
}

impl HistApprox {
    pub fn new(k: usize, epsilon: f64, max_lifetime: u32) -> Result<Self> {
        SieveState::new(k, epsilon)?;
        if max_lifetime < 1 {
            return Err(Error::Config("maximum lifetime must be at least 1".into()));
        }
        Ok(HistApprox {
            k,
            epsilon,
            max_lifetime,
            entries: Vec::new(),
            refine: false,
            track: false,
            next_id: 0,
            close: HashMap::new(),
            close_order: VecDeque::new(),
            forgotten: HashSet::new(),
            log_capacity: DEFAULT_LOG_CAPACITY,
            passes: None,
            last_affected: 0,
        })
    }

    /// Answer queries from a scratch copy of the head that has also consumed
    /// the alive edges below the head's index.
    pub fn refine_head(mut self, on: bool) -> Self {
        self.refine = on;
        self
    }

    /// Every instance created from now on logs the edges it is fed.
    pub fn track_processed(mut self) -> Self {
        self.track = true;
        self
    }

    /// Keep a record of every pruning pass; see [`take_passes`](Self::take_passes).
    pub fn record_passes(mut self) -> Self {
        self.passes = Some(Vec::new());
        self
    }

    /// Bound on remembered closeness events used by [`adjacent_pairs`](Self::adjacent_pairs).
    pub fn with_log_capacity(mut self, capacity: usize) -> Self {
        self.log_capacity = capacity.max(1);
        self
    }

    pub fn take_passes(&mut self) -> Vec<PassRecord> {
        self.passes.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn max_lifetime(&self) -> u32 {
        self.max_lifetime
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `x_t`, ascending.
    pub fn indices(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.index).collect()
    }

    pub fn instance_count(&self) -> usize {
        self.entries.len()
    }

    pub fn instance(&self, index: u32) -> Option<&SieveState> {
        self.position(index).ok().map(|p| &self.entries[p].sieve)
    }

    pub fn instance_id(&self, index: u32) -> Option<InstanceId> {
        self.position(index).ok().map(|p| self.entries[p].id)
    }

    /// Outputs cached from the most recent pruning pass, ascending by index.
    pub fn cached_outputs(&self) -> Vec<(u32, usize)> {
        self.entries.iter().map(|e| (e.index, e.g)).collect()
    }

    /// Largest affected set fed to any instance during the last
    /// [`process`](Self::process).
    pub fn last_affected(&self) -> usize {
        self.last_affected
    }

    /// Routes this step's arrivals (already inserted into `graph`) through
    /// [`process_edges`](Self::process_edges), one lifetime at a time in
    /// ascending order. Input order is kept within a lifetime.
    pub fn process(&mut self, graph: &TdnGraph, oracle: &mut Oracle, batch: &[Edge]) -> Result<()> {
        let mut by_lifetime: BTreeMap<u32, Vec<Edge>> = BTreeMap::new();
        for e in batch {
            let l = self.check_lifetime(e.lifetime())?;
            by_lifetime.entry(l).or_default().push(*e);
        }
        self.last_affected = 0;
        for (l, edges) in by_lifetime {
            self.process_edges(graph, oracle, l, &edges)?;
        }
        Ok(())
    }

    /// Handles the arrivals of one lifetime `l`, then prunes. Returns the
    /// indices removed by pruning.
    pub fn process_edges(
        &mut self,
        graph: &TdnGraph,
        oracle: &mut Oracle,
        l: u32,
        edges: &[Edge],
    ) -> Result<Vec<u32>> {
        let l = self.check_lifetime(Lifetime::Finite(l))?;
        if let Some(e) = edges.iter().find(|e| e.lifetime() != Lifetime::Finite(l)) {
            return Err(Error::Config(format!(
                "edge {:?} has lifetime {} but was routed with lifetime {l}",
                e.id,
                e.lifetime()
            )));
        }
        let now = graph.now();
        oracle.attributed(CallKind::Update, |oracle| {
            if let Err(p) = self.position(l) {
                let entry = if p == self.entries.len() {
                    self.fresh_entry(l)
                } else {
                    let upper = &self.entries[p];
                    let mut sieve = upper.sieve.clone();
                    let backlog: Vec<Edge> = graph
                        .edges_with_remaining_lifetime_in(l, Some(upper.index))
                        .into_iter()
                        .filter(|e| e.interaction.arrival < now)
                        .collect();
                    let view = graph.view_with_min_remaining(l).without_fresh();
                    let stats = sieve.feed(&view, oracle, &backlog);
                    self.last_affected = self.last_affected.max(stats.affected);
                    let id = self.new_id();
                    Entry {
                        index: l,
                        id,
                        sieve,
                        g: 0,
                    }
                };
                if p > 0 {
                    let lower = self.entries[p - 1].id;
                    self.forget_close(lower, self.entries.get(p).map(|e| e.id));
                }
                self.entries.insert(p, entry);
            }
            for entry in self.entries.iter_mut().take_while(|e| e.index <= l) {
                let view = graph
                    .view_with_min_remaining(entry.index)
                    .with_fresh_lifetime_at_most(l);
                let stats = entry.sieve.feed(&view, oracle, edges);
                self.last_affected = self.last_affected.max(stats.affected);
            }
        });
        Ok(self.prune(graph))
    }

    /// Drops every instance strictly between `i` and the largest later index
    /// whose output is at least `(1-ε)` times `i`'s, for each surviving `i`
    /// in ascending order. Outputs are read once at the start of the pass.
    pub fn reduce_redundancy(&mut self, graph: &TdnGraph) -> Vec<u32> {
        self.prune(graph)
    }

    /// The current answer. With refinement on, a scratch copy of the head
    /// consumes the alive edges below its index first; the histogram itself
    /// is untouched.
    pub fn query(&mut self, graph: &TdnGraph, oracle: &mut Oracle) -> Answer {
        oracle.attributed(CallKind::Query, |oracle| {
            let Some(head) = self.entries.first_mut() else {
                return Answer {
                    solution: NodeSet::new(),
                    value: 0,
                    head_value: 0,
                };
            };
            let (solution, head_value) = head.sieve.current_solution(graph);
            if head.index == 1 {
                return Answer {
                    solution,
                    value: head_value,
                    head_value,
                };
            }
            if self.refine {
                let mut scratch = head.sieve.clone();
                let below = graph.edges_with_remaining_lifetime_in(1, Some(head.index));
                let full = graph.view();
                scratch.feed(&full, oracle, &below);
                let (solution, value) = scratch.current_solution(graph);
                return Answer {
                    solution,
                    value,
                    head_value,
                };
            }
            let value = oracle.spread(&graph.view(), &solution);
            Answer {
                solution,
                value,
                head_value,
            }
        })
    }

    /// Retires index 1 if present and relabels `x` to `x - 1`. Call once per
    /// step, before the graph clock advances.
    pub fn advance(&mut self) {
        if self.entries.first().is_some_and(|e| e.index == 1) {
            self.entries.remove(0);
        }
        for e in &mut self.entries {
            e.index -= 1;
        }
    }

    /// One full step: process, answer, shift.
    pub fn step(&mut self, graph: &TdnGraph, oracle: &mut Oracle, batch: &[Edge]) -> Result<Answer> {
        self.process(graph, oracle, batch)?;
        let answer = self.query(graph, oracle);
        self.advance();
        Ok(answer)
    }

    /// Classifies every pair of neighbouring indices against `graph`.
    pub fn adjacent_pairs(&self, graph: &TdnGraph) -> Vec<AdjacentPair> {
        self.entries
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let status = if graph
                    .edges_with_remaining_lifetime_in(a.index + 1, Some(b.index))
                    .is_empty()
                {
                    PairStatus::NoEdgesBetween
                } else if let Some(&since) = self.close.get(&(a.id, b.id)) {
                    PairStatus::CloseSince { since }
                } else if self.forgotten.contains(&(a.id, b.id)) {
                    PairStatus::Forgotten
                } else {
                    PairStatus::Unexplained
                };
                AdjacentPair {
                    lower: a.index,
                    upper: b.index,
                    status,
                }
            })
            .collect()
    }

    /// Edges processed by the instance at `index`, when tracking is on.
    pub fn processed_edges(&self, index: u32) -> Option<&[EdgeId]> {
        self.instance(index)?.processed_edges()
    }

    fn prune(&mut self, graph: &TdnGraph) -> Vec<u32> {
        let now = graph.now();
        for e in &mut self.entries {
            e.g = e.sieve.output_value();
        }

        let floor = 1.0 - self.epsilon;
        let mut removed = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let target = floor * self.entries[i].g as f64;
            let j = (i + 1..self.entries.len())
                .rev()
                .find(|&j| self.entries[j].g as f64 >= target);
            if let Some(j) = j {
                removed.extend(self.entries.drain(i + 1..j).map(|e| e.index));
            }
            i += 1;
        }

        for w in 0..self.entries.len().saturating_sub(1) {
            let (a, b) = (&self.entries[w], &self.entries[w + 1]);
            if b.g as f64 >= floor * a.g as f64 {
                self.remember_close(a.id, b.id, now);
            }
        }
        if let Some(passes) = self.passes.as_mut() {
            passes.push(PassRecord {
                time: now,
                indices: self.entries.iter().map(|e| e.index).collect(),
                g: self.entries.iter().map(|e| e.g).collect(),
                removed: removed.clone(),
            });
        }
        removed
    }

    fn remember_close(&mut self, a: InstanceId, b: InstanceId, now: Timestep) {
        if self.close.insert((a, b), now).is_none() {
            self.close_order.push_back((a, b));
        }
        while self.close_order.len() > self.log_capacity {
            if let Some(old) = self.close_order.pop_front() {
                if self.close.remove(&old).is_some() {
                    self.forgotten.insert(old);
                }
            }
        }
    }

    fn forget_close(&mut self, lower: InstanceId, upper: Option<InstanceId>) {
        if let Some(upper) = upper {
            self.close.remove(&(lower, upper));
            self.forgotten.remove(&(lower, upper));
        }
    }

    fn fresh_entry(&mut self, index: u32) -> Entry {
        let mut sieve = SieveState::new(self.k, self.epsilon).expect("parameters validated");
        if self.track {
            sieve = sieve.track_processed();
        }
        Entry {
            index,
            id: self.new_id(),
            sieve,
            g: 0,
        }
    }

    fn new_id(&mut self) -> InstanceId {
        self.next_id += 1;
        InstanceId(self.next_id - 1)
    }

    fn position(&self, index: u32) -> std::result::Result<usize, usize> {
        self.entries.binary_search_by_key(&index, |e| e.index)
    }

    fn check_lifetime(&self, lifetime: Lifetime) -> Result<u32> {
        match lifetime {
            Lifetime::Finite(l) if (1..=self.max_lifetime).contains(&l) => Ok(l),
            lifetime => Err(Error::LifetimeExceedsMax {
                lifetime,
                max: self.max_lifetime,
            }),
        }
    }
}

/// Positions removed by one pruning pass over outputs `g` (ascending index
/// order), without touching any instance.
pub fn redundant_positions(g: &[f64], epsilon: f64) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..g.len()).collect();
    let mut removed = Vec::new();
    let mut i = 0;
    while i < alive.len() {
        let target = (1.0 - epsilon) * g[alive[i]];
        if let Some(j) = (i + 1..alive.len()).rev().find(|&j| g[alive[j]] >= target) {
            removed.extend(alive.drain(i + 1..j));
        }
        i += 1;
    }
    removed.sort_unstable();
    removed
}
