//! Seeded synthetic interaction streams with skewed source activity.
//!
//! Each interaction's source is, with probability `bias / (1 + bias)`, a
//! copy of an earlier interaction's source (so a node is picked in
//! proportion to how active it has been), and otherwise uniform. Targets
//! are uniform over the other nodes. A bias of zero gives uniform sources.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::SyntheticSpec;
use super::stream::Batch;
use crate::tdn::{RawInteraction, Timestep};

pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Vec<Batch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.nodes;
    let copy = spec.bias / (1.0 + spec.bias);
    let mut history: Vec<u64> = Vec::with_capacity(spec.edges_per_step * spec.steps as usize);
    let mut batches = Vec::with_capacity(spec.steps as usize);
    for step in 0..spec.steps as Timestep {
        let mut records = Vec::with_capacity(spec.edges_per_step);
        for _ in 0..spec.edges_per_step {
            let source = if !history.is_empty() && rng.gen_bool(copy) {
                history[rng.gen_range(0..history.len())]
            } else {
                rng.gen_range(0..n)
            };
            let mut target = rng.gen_range(0..n - 1);
            if target >= source {
                target += 1;
            }
            history.push(source);
            records.push(RawInteraction::new(source, target, step));
        }
        batches.push(Batch {
            step,
            timestamp: step as i64,
            records,
        });
    }
    batches
}
