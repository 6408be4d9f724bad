//! Threshold sieving on a growing network where nothing expires.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdn_influence::baselines::lazy_greedy;
use tdn_influence::{Interaction, Lifetime, Oracle, SieveState, TdnGraph};

fn main() -> tdn_influence::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut g = TdnGraph::new();
    let mut oracle = Oracle::new();
    let mut sieve = SieveState::new(5, 0.1)?;

    for step in 0..30 {
        let now = g.now();
        let batch: Vec<Interaction> = (0..8)
            .map(|_| {
                // a few hubs talk a lot
                let u = if rng.gen_bool(0.5) { rng.gen_range(0..5) } else { rng.gen_range(0..200) };
                let v = rng.gen_range(0..200);
                (u, v)
            })
            .filter(|(u, v)| u != v)
            .map(|(u, v)| Interaction::new(u, v, now, Lifetime::Infinite).unwrap())
            .collect();
        let edges = g.insert_batch(batch)?;
        let stats = sieve.feed(&g.view(), &mut oracle, &edges);
        if step % 10 == 9 {
            let (set, value) = sieve.current_solution(&g);
            println!(
                "t={now:>2} Δ={:>3} thresholds={:>2} affected={:>3} value={value:>3} seeds={:?}",
                sieve.delta(),
                stats.thresholds,
                stats.affected,
                set.to_vec()
            );
        }
        g.advance_time();
    }

    let sieve_calls = oracle.calls();
    let (_, greedy_value) = lazy_greedy(&g.view(), &mut oracle, 5);
    println!(
        "sieve used {sieve_calls} calls in total; one lazy greedy run now costs {} and reaches {greedy_value}",
        oracle.calls() - sieve_calls
    );
    Ok(())
}
