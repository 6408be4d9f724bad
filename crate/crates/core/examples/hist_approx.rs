//! The pruned histogram on a skewed synthetic stream with geometric
//! lifetimes, against lazy greedy recomputed every step.

use tdn_influence::baselines::lazy_greedy;
use tdn_influence::harness::{generate_synthetic, SyntheticSpec};
use tdn_influence::tdn::LifetimeAssigner;
use tdn_influence::{HistApprox, LifetimePolicy, Oracle, TdnGraph};

fn main() -> anyhow::Result<()> {
    let max = 200;
    let spec: SyntheticSpec = "300,10,600,100".parse()?;
    let mut lifetimes = LifetimeAssigner::new(LifetimePolicy::Geometric { p: 0.01, max: Some(max) }, 1)?;
    let mut g = TdnGraph::new().with_max_lifetime(max);
    let (mut hist_oracle, mut greedy_oracle) = (Oracle::new(), Oracle::new());
    let mut hist = HistApprox::new(10, 0.2, max)?;
    let (mut hist_total, mut greedy_total) = (0, 0);

    for batch in generate_synthetic(&spec, 1) {
        let now = g.now();
        let (interactions, _) = lifetimes.assign(&batch.records);
        let edges = g.insert_batch(interactions.into_iter().map(|mut e| {
            e.arrival = now;
            e
        }))?;
        let answer = hist.step(&g, &mut hist_oracle, &edges)?;
        let (_, best) = lazy_greedy(&g.view(), &mut greedy_oracle, 10);
        hist_total += answer.value;
        greedy_total += best;
        if now % 100 == 99 {
            println!(
                "t={now:>3} alive={:>4} instances={:>2} hist={:>3} greedy={best:>3}",
                g.alive_edge_count(),
                hist.instance_count(),
                answer.value
            );
        }
        g.advance_time();
    }
    println!(
        "value ratio {:.3}; oracle calls hist {} vs lazy greedy {}",
        hist_total as f64 / greedy_total as f64,
        hist_oracle.calls(),
        greedy_oracle.calls()
    );
    Ok(())
}
