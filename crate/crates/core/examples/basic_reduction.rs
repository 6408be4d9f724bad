//! A ring of `L` sieves over a sliding window: every interaction lives for
//! exactly `W` steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdn_influence::baselines::greedy;
use tdn_influence::{BasicReduction, Interaction, Lifetime, Oracle, TdnGraph};

const WINDOW: u32 = 12;

fn main() -> tdn_influence::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut g = TdnGraph::new().with_max_lifetime(WINDOW);
    let mut oracle = Oracle::new();
    let mut ring = BasicReduction::new(4, 0.2, WINDOW)?;
    let mut reference = Oracle::new();

    for _ in 0..60 {
        let now = g.now();
        // the active community drifts over time
        let base = now / 5;
        let batch: Vec<Interaction> = (0..6)
            .map(|_| (base + rng.gen_range(0..10), base + rng.gen_range(0..30)))
            .filter(|(u, v)| u != v)
            .map(|(u, v)| Interaction::new(u, v, now, Lifetime::Finite(WINDOW)).unwrap())
            .collect();
        let edges = g.insert_batch(batch)?;
        let (seeds, value) = ring.step(&g, &mut oracle, &edges)?;
        if now % 10 == 9 {
            let (_, best) = greedy(&g.view(), &mut reference, 4);
            println!(
                "t={now:>2} alive={:>3} ring={value:>3} greedy={best:>3} seeds={:?}",
                g.alive_edge_count(),
                seeds.to_vec()
            );
        }
        g.advance_time();
    }
    println!("ring: {} calls; greedy at every tenth step: {}", oracle.calls(), reference.calls());
    Ok(())
}
