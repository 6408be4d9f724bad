//! Replaying an edge-list file whose fourth column carries lifetimes.
//!
//! Defaults to `examples/data/replies.txt`; pass another path to use it.

use std::path::PathBuf;

use tdn_influence::harness::{parse_stream, run_experiment, Algorithm, ExperimentConfig, LifetimeSpec};

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/replies.txt"));

    let parsed = parse_stream(&path, true)?;
    for b in &parsed.batches {
        println!("step {} (timestamp {}): {} interactions", b.step, b.timestamp, b.records.len());
    }

    let config = ExperimentConfig {
        algorithms: vec![Algorithm::HistApprox, Algorithm::BruteForce],
        k: 2,
        lifetime: LifetimeSpec::Column,
        max_lifetime: Some(4),
        input: Some(path),
        strict: true,
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&config)?;
    for r in &result.records {
        println!(
            "t={} {:<12} {:?} reaches {}",
            r.timestep,
            r.algorithm.to_string(),
            r.solution.to_vec(),
            r.value
        );
    }
    Ok(())
}
