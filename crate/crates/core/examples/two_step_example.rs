//! The nine-edge, two-step example: who is most influential at `t` and at
//! `t+1`, and which edges each ring instance has seen.

use tdn_influence::baselines::greedy;
use tdn_influence::{BasicReduction, Interaction, Lifetime, Oracle, TdnGraph};

fn main() -> tdn_influence::Result<()> {
    let mut g = TdnGraph::new().with_max_lifetime(3);
    let mut oracle = Oracle::new();
    let mut ring = BasicReduction::new(2, 0.1, 3)?.track_processed();

    let steps: [&[(u64, u64, u32)]; 2] = [
        &[(1, 2, 1), (1, 3, 1), (1, 4, 2), (5, 3, 3), (6, 4, 1), (6, 7, 1)],
        &[(5, 2, 1), (7, 4, 2), (7, 6, 3)],
    ];
    for batch in steps {
        let now = g.now();
        let edges = g.insert_batch(
            batch
                .iter()
                .map(|&(u, v, l)| Interaction::new(u, v, now, Lifetime::Finite(l)).unwrap()),
        )?;
        println!("t = {now}: {} alive edges", g.alive_edge_count());

        let (best, value) = oracle.brute_force_opt(&g.view(), 2)?;
        println!("  optimum       {:?} reaches {value}", best.to_vec());
        let (picked, value) = greedy(&g.view(), &mut oracle, 2);
        println!("  greedy        {:?} reaches {value}", picked.to_vec());

        let (answer, value) = ring.step(&g, &mut oracle, &edges)?;
        println!("  ring answer   {:?} reaches {value}", answer.to_vec());
        // after step() the ring has shifted: instance i now holds what i+1 held
        for i in 1..=2 {
            let seen = ring.instance(i).unwrap().processed_edges().unwrap();
            println!("  next A_{i} has seen edges {seen:?}");
        }
        g.advance_time();
    }
    println!("oracle calls: {:?}", oracle.counter());
    Ok(())
}
