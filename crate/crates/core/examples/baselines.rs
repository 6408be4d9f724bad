//! Greedy, lazy greedy and random seeds on one snapshot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdn_influence::baselines::{greedy, lazy_greedy, random_k};
use tdn_influence::{Interaction, Lifetime, Oracle, TdnGraph};

fn main() -> tdn_influence::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = TdnGraph::new();
    let edges: Vec<Interaction> = (0..600)
        .map(|_| (rng.gen_range(0..400u64), rng.gen_range(0..400u64)))
        .filter(|(u, v)| u != v)
        .map(|(u, v)| Interaction::new(u, v, 0, Lifetime::Infinite).unwrap())
        .collect();
    g.insert_batch(edges)?;
    let view = g.view();

    for k in [1, 5, 20] {
        let (mut a, mut b, mut c) = (Oracle::new(), Oracle::new(), Oracle::new());
        let (_, plain) = greedy(&view, &mut a, k);
        let (_, lazy) = lazy_greedy(&view, &mut b, k);
        let random = c.spread(&view, &random_k(&view, k, 9));
        println!(
            "k={k:>2}: greedy {plain:>3} ({:>5} calls)  lazy {lazy:>3} ({:>4} calls)  random {random:>3}",
            a.calls(),
            b.calls()
        );
    }
    Ok(())
}
