//! Several algorithms replaying one synthetic stream through the harness,
//! the same way the `tdn-bench` binary does.

use tdn_influence::harness::{run_experiment, Algorithm, ExperimentConfig, LifetimeSpec};

fn main() -> anyhow::Result<()> {
    let config = ExperimentConfig {
        algorithms: vec![
            Algorithm::HistApprox,
            Algorithm::HistApproxExact,
            Algorithm::BasicReduction,
            Algorithm::LazyGreedy,
            Algorithm::Random,
        ],
        k: 5,
        epsilon: 0.2,
        lifetime: LifetimeSpec::Geometric(0.05),
        max_lifetime: Some(60),
        synthetic: Some("200,8,300,100".parse()?),
        seed: 2,
        ..ExperimentConfig::default()
    };
    print!("{}", config.to_toml());
    let result = run_experiment(&config)?;
    for s in &result.summaries {
        println!(
            "{:<18} mean value {:>7.2}  calls {:>8}  mean instances {:>6.2}",
            s.algorithm.to_string(),
            s.mean_value,
            s.calls.total(),
            s.mean_instances
        );
    }
    Ok(())
}
