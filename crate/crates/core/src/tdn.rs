//! The time-decaying dynamic interaction network.
//!
//! Interactions arrive in per-timestep batches, each carrying a lifetime. An
//! interaction that arrives at `τ` with lifetime `l` is alive at every `t`
//! with `τ <= t < τ + l`; at `t = τ + l` it is dropped from the graph, and a
//! node disappears together with its last incident edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete time. Every batch of interactions shares one timestep.
pub type Timestep = u64;

/// Sentinel expiry for edges that never leave the graph.
pub(crate) const NEVER: Timestep = Timestep::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u64);

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of timesteps an interaction survives after arrival.
///
/// `Finite` values are always at least one. Ordering puts every finite value
/// below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lifetime {
    Finite(u32),
    Infinite,
}

impl Lifetime {
    /// Returns `None` for zero.
    pub fn finite(steps: u32) -> Option<Self> {
        (steps > 0).then_some(Lifetime::Finite(steps))
    }

    pub fn steps(self) -> Option<u32> {
        match self {
            Lifetime::Finite(l) => Some(l),
            Lifetime::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Lifetime::Infinite)
    }
}

impl fmt::Display for Lifetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lifetime::Finite(l) => l.fmt(f),
            Lifetime::Infinite => f.write_str("inf"),
        }
    }
}

/// An interaction as read from a stream, before a lifetime is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawInteraction {
    pub source: NodeId,
    pub target: NodeId,
    pub time: Timestep,
    /// Only consulted by [`LifetimePolicy::FromColumn`].
    pub lifetime: Option<i64>,
}

impl RawInteraction {
    pub fn new(source: impl Into<NodeId>, target: impl Into<NodeId>, time: Timestep) -> Self {
        RawInteraction {
            source: source.into(),
            target: target.into(),
            time,
            lifetime: None,
        }
    }

    pub fn with_lifetime(mut self, lifetime: i64) -> Self {
        self.lifetime = Some(lifetime);
        self
    }
}

/// Node `source` influenced node `target` at `arrival`; the evidence lasts
/// for `lifetime` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interaction {
    pub source: NodeId,
    pub target: NodeId,
    pub arrival: Timestep,
    pub lifetime: Lifetime,
}

impl Interaction {
    pub fn new(
        source: impl Into<NodeId>,
        target: impl Into<NodeId>,
        arrival: Timestep,
        lifetime: Lifetime,
    ) -> Result<Self> {
        let (source, target) = (source.into(), target.into());
        if source == target {
            return Err(Error::SelfLoop {
                index: 0,
                node: source,
            });
        }
        Ok(Interaction {
            source,
            target,
            arrival,
            lifetime,
        })
    }

    /// First timestep at which the interaction is no longer alive.
    pub fn expiry(&self) -> Option<Timestep> {
        self.lifetime.steps().map(|l| self.arrival + l as Timestep)
    }

    pub fn is_alive_at(&self, t: Timestep) -> bool {
        self.arrival <= t && self.expiry().is_none_or(|e| t < e)
    }

    /// Remaining lifetime at `t`, `None` when unbounded. Only meaningful
    /// while the interaction is alive.
    pub fn remaining_at(&self, t: Timestep) -> Option<u64> {
        self.expiry().map(|e| e.saturating_sub(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u64);

/// An interaction stored in a [`TdnGraph`]. Ids grow with insertion order,
/// so sorting by id sorts by arrival and then by input position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub interaction: Interaction,
}

impl Edge {
    pub fn source(&self) -> NodeId {
        self.interaction.source
    }

    pub fn target(&self) -> NodeId {
        self.interaction.target
    }

    pub fn lifetime(&self) -> Lifetime {
        self.interaction.lifetime
    }
}

/// How lifetimes are attached to raw interactions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LifetimePolicy {
    /// Addition-only network: nothing ever expires.
    Infinite,
    /// Sliding window of the last `W` steps.
    Constant(u32),
    /// `Pr(l) ∝ (1-p)^(l-1) p` on `1..=max`, or on all positive integers
    /// when `max` is `None`.
    Geometric { p: f64, max: Option<u32> },
    /// Lifetime supplied by the input record.
    FromColumn,
}

impl LifetimePolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LifetimePolicy::Constant(0) => {
                Err(Error::Config("constant lifetime must be at least 1".into()))
            }
            LifetimePolicy::Geometric { p, .. } if !(p > 0.0 && p <= 1.0) => Err(Error::Config(
                format!("geometric parameter p must lie in (0, 1], got {p}"),
            )),
            LifetimePolicy::Geometric { max: Some(0), .. } => {
                Err(Error::Config("maximum lifetime must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Attaches lifetimes to raw interactions according to a [`LifetimePolicy`].
/// Deterministic for a fixed seed.
#[derive(Debug, Clone)]
pub struct LifetimeAssigner {
    policy: LifetimePolicy,
    rng: ChaCha8Rng,
    geometric: Option<Geometric>,
}

impl LifetimeAssigner {
    pub fn new(policy: LifetimePolicy, seed: u64) -> Result<Self> {
        policy.validate()?;
        let geometric = match policy {
            LifetimePolicy::Geometric { p, .. } => Some(
                Geometric::new(p).map_err(|e| Error::Config(format!("geometric law: {e}")))?,
            ),
            _ => None,
        };
        Ok(LifetimeAssigner {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            geometric,
        })
    }

    pub fn policy(&self) -> LifetimePolicy {
        self.policy
    }

    /// Draws one lifetime. Meaningless for [`LifetimePolicy::FromColumn`],
    /// which yields `Infinite`.
    pub fn sample(&mut self) -> Lifetime {
        match self.policy {
            LifetimePolicy::Infinite | LifetimePolicy::FromColumn => Lifetime::Infinite,
            LifetimePolicy::Constant(w) => Lifetime::Finite(w),
            LifetimePolicy::Geometric { max, .. } => {
                let law = self.geometric.as_ref().expect("geometric law");
                // `Geometric` counts failures before the first success.
                loop {
                    let l = law.sample(&mut self.rng).saturating_add(1);
                    let l = u32::try_from(l).unwrap_or(u32::MAX);
                    if max.is_none_or(|m| l <= m) {
                        return Lifetime::Finite(l);
                    }
                }
            }
        }
    }

    /// Annotates a batch. Records that cannot become interactions are
    /// returned separately with their position in `batch`.
    pub fn assign(&mut self, batch: &[RawInteraction]) -> (Vec<Interaction>, Vec<Error>) {
        let mut accepted = Vec::with_capacity(batch.len());
        let mut rejected = Vec::new();
        for (index, raw) in batch.iter().enumerate() {
            if raw.source == raw.target {
                rejected.push(Error::SelfLoop {
                    index,
                    node: raw.source,
                });
                continue;
            }
            let lifetime = if self.policy == LifetimePolicy::FromColumn {
                match raw.lifetime {
                    None => {
                        rejected.push(Error::MissingLifetime { index });
                        continue;
                    }
                    Some(value) if value <= 0 => {
                        rejected.push(Error::NonPositiveLifetime { index, value });
                        continue;
                    }
                    Some(value) => Lifetime::Finite(u32::try_from(value).unwrap_or(u32::MAX)),
                }
            } else {
                self.sample()
            };
            accepted.push(Interaction {
                source: raw.source,
                target: raw.target,
                arrival: raw.time,
                lifetime,
            });
        }
        (accepted, rejected)
    }
}

/// What [`TdnGraph::advance_time`] removed.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ExpiryReport {
    pub expired: Vec<Edge>,
    pub removed_nodes: Vec<NodeId>,
}

impl ExpiryReport {
    pub fn is_empty(&self) -> bool {
        self.expired.is_empty() && self.removed_nodes.is_empty()
    }
}

/// One adjacency entry. `node` is the far endpoint as a dense index.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Link {
    pub node: u32,
    pub expiry: Timestep,
    pub edge: EdgeId,
}

/// The network `G_t` of currently alive interactions.
///
/// Node ids are mapped to dense indices on first sight and the mapping is
/// never recycled, so an index stays valid for the life of the graph even
/// after the node has left `V_t`.
#[derive(Debug, Clone, Default)]
pub struct TdnGraph {
    now: Timestep,
    max_lifetime: Option<u32>,
    index: HashMap<NodeId, u32>,
    ids: Vec<NodeId>,
    out: Vec<Vec<Link>>,
    inc: Vec<Vec<Link>>,
    degree: Vec<u32>,
    alive_nodes: usize,
    edges: BTreeMap<EdgeId, Interaction>,
    /// Expiry timestep -> edges leaving the graph at that step.
    calendar: BTreeMap<Timestep, Vec<EdgeId>>,
    next_edge: u64,
    /// First edge id inserted at the current timestep.
    step_start: u64,
}

impl TdnGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(now: Timestep) -> Self {
        TdnGraph {
            now,
            ..Self::default()
        }
    }

    /// Rejects any later insertion whose lifetime exceeds `max` (including
    /// infinite lifetimes).
    pub fn with_max_lifetime(mut self, max: u32) -> Self {
        self.max_lifetime = Some(max);
        self
    }

    pub fn now(&self) -> Timestep {
        self.now
    }

    pub fn max_lifetime(&self) -> Option<u32> {
        self.max_lifetime
    }

    pub fn alive_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn alive_node_count(&self) -> usize {
        self.alive_nodes
    }

    /// Alive edges in arrival order.
    pub fn alive_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .map(|(&id, &interaction)| Edge { id, interaction })
    }

    /// `V_t`, in ascending id order.
    pub fn alive_nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self
            .degree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(ix, _)| self.ids[ix])
            .collect();
        nodes.sort_unstable();
        nodes
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.index
            .get(&node)
            .is_some_and(|&ix| self.degree[ix as usize] > 0)
    }

    pub fn edge(&self, id: EdgeId) -> Option<Edge> {
        self.edges.get(&id).map(|&interaction| Edge { id, interaction })
    }

    /// Adds one timestep's arrivals. The batch is validated as a whole and
    /// rejected without side effects if any interaction arrives at a time
    /// other than [`now`](Self::now) or exceeds the maximum lifetime.
    pub fn insert_batch(
        &mut self,
        batch: impl IntoIterator<Item = Interaction>,
    ) -> Result<Vec<Edge>> {
        let batch: Vec<Interaction> = batch.into_iter().collect();
        for (index, e) in batch.iter().enumerate() {
            if e.arrival != self.now {
                return Err(Error::NonChronological {
                    now: self.now,
                    found: e.arrival,
                });
            }
            if e.source == e.target {
                return Err(Error::SelfLoop {
                    index,
                    node: e.source,
                });
            }
            if let Some(max) = self.max_lifetime {
                if e.lifetime > Lifetime::Finite(max) {
                    return Err(Error::LifetimeExceedsMax {
                        lifetime: e.lifetime,
                        max,
                    });
                }
            }
        }

        let mut inserted = Vec::with_capacity(batch.len());
        for interaction in batch {
            let id = EdgeId(self.next_edge);
            self.next_edge += 1;
            let u = self.intern(interaction.source);
            let v = self.intern(interaction.target);
            let expiry = interaction.expiry().unwrap_or(NEVER);
            self.out[u as usize].push(Link {
                node: v,
                expiry,
                edge: id,
            });
            self.inc[v as usize].push(Link {
                node: u,
                expiry,
                edge: id,
            });
            self.touch(u);
            self.touch(v);
            if expiry != NEVER {
                self.calendar.entry(expiry).or_default().push(id);
            }
            self.edges.insert(id, interaction);
            inserted.push(Edge { id, interaction });
        }
        Ok(inserted)
    }

    /// Moves the clock one step forward and drops everything that expires
    /// at the new time.
    pub fn advance_time(&mut self) -> ExpiryReport {
        self.now += 1;
        self.step_start = self.next_edge;
        let mut report = ExpiryReport::default();
        let Some(due) = self.calendar.remove(&self.now) else {
            return report;
        };
        for id in due {
            let interaction = self.edges.remove(&id).expect("calendar out of sync");
            let u = self.index[&interaction.source];
            let v = self.index[&interaction.target];
            remove_link(&mut self.out[u as usize], id);
            remove_link(&mut self.inc[v as usize], id);
            for ix in [u, v] {
                if self.release(ix) {
                    report.removed_nodes.push(self.ids[ix as usize]);
                }
            }
            report.expired.push(Edge { id, interaction });
        }
        report
    }

    /// Alive edges whose remaining lifetime lies in `[low, high)`, in
    /// arrival order. `high = None` means unbounded and includes edges with
    /// infinite lifetime.
    pub fn edges_with_remaining_lifetime_in(&self, low: u32, high: Option<u32>) -> Vec<Edge> {
        let low = low.max(1);
        let from = self.now + low as Timestep;
        let mut ids: Vec<EdgeId> = match high {
            Some(high) if high <= low => return Vec::new(),
            Some(high) => self
                .calendar
                .range(from..self.now + high as Timestep)
                .flat_map(|(_, ids)| ids.iter().copied())
                .collect(),
            None => {
                let mut ids: Vec<EdgeId> = self
                    .calendar
                    .range(from..)
                    .flat_map(|(_, ids)| ids.iter().copied())
                    .collect();
                ids.extend(
                    self.edges
                        .iter()
                        .filter(|(_, e)| e.lifetime.is_infinite())
                        .map(|(&id, _)| id),
                );
                ids
            }
        };
        ids.sort_unstable();
        ids.into_iter()
            .map(|id| Edge {
                id,
                interaction: self.edges[&id],
            })
            .collect()
    }

    /// The whole of `G_t`.
    pub fn view(&self) -> GraphView<'_> {
        self.view_with_min_remaining(1)
    }

    /// The subgraph of edges with remaining lifetime at least `floor`.
    pub fn view_with_min_remaining(&self, floor: u32) -> GraphView<'_> {
        GraphView {
            graph: self,
            cutoff: self.now.saturating_add(floor.max(1) as Timestep),
            fresh: EdgeId(self.step_start),
            horizon: NEVER,
        }
    }

    pub(crate) fn node_index(&self, node: NodeId) -> Option<u32> {
        self.index.get(&node).copied()
    }

    pub(crate) fn node_id(&self, ix: u32) -> NodeId {
        self.ids[ix as usize]
    }

    pub(crate) fn node_capacity(&self) -> usize {
        self.ids.len()
    }

    fn intern(&mut self, node: NodeId) -> u32 {
        if let Some(&ix) = self.index.get(&node) {
            return ix;
        }
        let ix = u32::try_from(self.ids.len()).expect("more than u32::MAX nodes");
        self.index.insert(node, ix);
        self.ids.push(node);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.degree.push(0);
        ix
    }

    fn touch(&mut self, ix: u32) {
        let d = &mut self.degree[ix as usize];
        if *d == 0 {
            self.alive_nodes += 1;
        }
        *d += 1;
    }

    /// Returns true when the node just lost its last edge.
    fn release(&mut self, ix: u32) -> bool {
        let d = &mut self.degree[ix as usize];
        *d -= 1;
        if *d == 0 {
            self.alive_nodes -= 1;
            true
        } else {
            false
        }
    }
}

fn remove_link(links: &mut Vec<Link>, id: EdgeId) {
    // Links are appended in id order, so the oldest sit near the front.
    if let Some(pos) = links.iter().position(|l| l.edge == id) {
        links.remove(pos);
    }
}

/// A read-only window on a [`TdnGraph`] restricted to edges whose remaining
/// lifetime is at least some floor. A floor of one is `G_t` itself.
///
/// Algorithms that run one sieve instance per lifetime class evaluate each
/// instance against the view matching the edges it has consumed.
#[derive(Clone, Copy, Debug)]
pub struct GraphView<'g> {
    graph: &'g TdnGraph,
    cutoff: Timestep,
    /// Edges from this id on arrived at the current timestep...
    fresh: EdgeId,
    /// ...and are visible only if they expire no later than this.
    horizon: Timestep,
}

impl<'g> GraphView<'g> {
    pub fn graph(&self) -> &'g TdnGraph {
        self.graph
    }

    /// Smallest remaining lifetime an edge must have to be visible.
    pub fn min_remaining(&self) -> u64 {
        self.cutoff - self.graph.now
    }

    /// The same view with edges that arrived at the current timestep limited
    /// to those of lifetime at most `lifetime`. Zero hides all of them.
    pub fn with_fresh_lifetime_at_most(&self, lifetime: u32) -> GraphView<'g> {
        GraphView {
            horizon: self.graph.now + lifetime as Timestep,
            ..*self
        }
    }

    /// The same view without the current timestep's arrivals.
    pub fn without_fresh(&self) -> GraphView<'g> {
        self.with_fresh_lifetime_at_most(0)
    }

    pub fn contains_edge(&self, edge: &Edge) -> bool {
        let expiry = edge.interaction.expiry().unwrap_or(NEVER);
        self.graph.edges.contains_key(&edge.id)
            && expiry >= self.cutoff
            && (edge.id < self.fresh || expiry <= self.horizon)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.graph
            .node_index(node)
            .is_some_and(|ix| self.is_present(ix))
    }

    /// Nodes with at least one visible incident edge, ascending by id.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = (0..self.graph.ids.len() as u32)
            .filter(|&ix| self.is_present(ix))
            .map(|ix| self.graph.ids[ix as usize])
            .collect();
        nodes.sort_unstable();
        nodes
    }

    pub(crate) fn is_present(&self, ix: u32) -> bool {
        let ix = ix as usize;
        if self.graph.degree[ix] == 0 {
            return false;
        }
        self.graph.out[ix].iter().any(|l| self.sees(l))
            || self.graph.inc[ix].iter().any(|l| self.sees(l))
    }

    #[inline]
    fn sees(&self, l: &Link) -> bool {
        l.expiry >= self.cutoff && (l.edge < self.fresh || l.expiry <= self.horizon)
    }

    #[inline]
    pub(crate) fn successors(&self, ix: u32) -> impl Iterator<Item = u32> + 'g {
        let view = *self;
        self.graph.out[ix as usize]
            .iter()
            .filter(move |l| view.sees(l))
            .map(|l| l.node)
    }

    /// Visible incoming edges as `(source, edge)` pairs.
    #[inline]
    pub(crate) fn in_links(&self, ix: u32) -> impl Iterator<Item = (u32, EdgeId)> + 'g {
        let view = *self;
        self.graph.inc[ix as usize]
            .iter()
            .filter(move |l| view.sees(l))
            .map(|l| (l.node, l.edge))
    }

    #[inline]
    pub(crate) fn predecessors(&self, ix: u32) -> impl Iterator<Item = u32> + 'g {
        let view = *self;
        self.graph.inc[ix as usize]
            .iter()
            .filter(move |l| view.sees(l))
            .map(|l| l.node)
    }
}
