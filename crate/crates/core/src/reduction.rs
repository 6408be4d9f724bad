//! A ring of `L` sieve instances over a network whose lifetimes are bounded
//! by `L`.
//!
//! Instance `A_i` consumes the arrivals whose lifetime is at least `i`. At
//! the end of a step the head `A_1` has seen exactly the alive edges, so its
//! answer is the answer for `G_t`. Then the head is dropped, every other
//! instance moves one slot forward and an empty instance joins at the tail.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::oracle::{CallKind, NodeSet, Oracle};
use crate::sieve::SieveState;
use crate::tdn::{Edge, Lifetime, TdnGraph};

#[derive(Clone, Debug)]
pub struct BasicReduction {
    k: usize,
    epsilon: f64,
    max_lifetime: u32,
    instances: VecDeque<SieveState>,
    track: bool,
    last_affected: usize,
}

impl BasicReduction {
    pub fn new(k: usize, epsilon: f64, max_lifetime: u32) -> Result<Self> {
        if max_lifetime < 1 {
            return Err(Error::Config("maximum lifetime must be at least 1".into()));
        }
        let blank = SieveState::new(k, epsilon)?;
        Ok(BasicReduction {
            k,
            epsilon,
            max_lifetime,
            instances: (0..max_lifetime).map(|_| blank.clone()).collect(),
            track: false,
            last_affected: 0,
        })
    }

    /// Makes every instance, including future ones, log the edges it is fed.
    pub fn track_processed(mut self) -> Self {
        self.track = true;
        self.instances = self.instances.into_iter().map(SieveState::track_processed).collect();
        self
    }

    pub fn max_lifetime(&self) -> u32 {
        self.max_lifetime
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    /// `A_i` for `1 <= i <= L`.
    pub fn instance(&self, i: u32) -> Option<&SieveState> {
        self.instances.get((i as usize).checked_sub(1)?)
    }

    /// Size of the head's affected set in the last [`process`](Self::process).
    pub fn last_affected(&self) -> usize {
        self.last_affected
    }

    /// Feeds this step's arrivals (already inserted into `graph`) to every
    /// instance. `A_i` only sees those of lifetime at least `i`, and works
    /// on the matching view of the graph.
    pub fn process(&mut self, graph: &TdnGraph, oracle: &mut Oracle, batch: &[Edge]) -> Result<()> {
        for e in batch {
            match e.lifetime() {
                Lifetime::Finite(l) if l <= self.max_lifetime => {}
                lifetime => {
                    return Err(Error::LifetimeExceedsMax {
                        lifetime,
                        max: self.max_lifetime,
                    })
                }
            }
        }
        oracle.attributed(CallKind::Update, |oracle| {
            for (slot, instance) in self.instances.iter_mut().enumerate() {
                let i = slot as u32 + 1;
                let fed: Vec<Edge> = batch
                    .iter()
                    .filter(|e| e.lifetime() >= Lifetime::Finite(i))
                    .copied()
                    .collect();
                if fed.is_empty() {
                    // lifetimes only shrink along the ring
                    break;
                }
                let stats = instance.feed(&graph.view_with_min_remaining(i), oracle, &fed);
                if i == 1 {
                    self.last_affected = stats.affected;
                }
            }
        });
        if batch.is_empty() {
            self.last_affected = 0;
        }
        Ok(())
    }

    /// The head's answer on `G_t`.
    pub fn query(&self, graph: &TdnGraph) -> (NodeSet, usize) {
        self.instances[0].current_solution(graph)
    }

    /// Retires the head and shifts the ring. Call once per step, before the
    /// graph clock advances.
    pub fn advance(&mut self) {
        self.instances.pop_front();
        let mut fresh = SieveState::new(self.k, self.epsilon).expect("parameters validated");
        if self.track {
            fresh = fresh.track_processed();
        }
        self.instances.push_back(fresh);
    }

    /// One full step: process, answer, shift.
    pub fn step(&mut self, graph: &TdnGraph, oracle: &mut Oracle, batch: &[Edge]) -> Result<(NodeSet, usize)> {
        self.process(graph, oracle, batch)?;
        let answer = self.query(graph);
        self.advance();
        Ok(answer)
    }
}
