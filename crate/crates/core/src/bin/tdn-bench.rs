use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use tdn_influence::harness::{run_experiment, Algorithm, ExperimentConfig, LifetimeSpec, SyntheticSpec};

/// Replay an interaction stream through influence-tracking algorithms and
/// write per-step metrics.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// TOML experiment file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Comma-separated: sieve-adn, basic-reduction, hist-approx,
    /// hist-approx-exact, greedy, lazy-greedy, random, brute-force.
    #[arg(long, value_delimiter = ',')]
    algorithm: Vec<Algorithm>,

    #[arg(long)]
    k: Option<usize>,

    #[arg(long)]
    epsilon: Option<f64>,

    /// infinite | const:W | geom:p | column
    #[arg(long)]
    lifetime: Option<LifetimeSpec>,

    #[arg(long)]
    max_lifetime: Option<u32>,

    /// Edge list: source,target,timestamp[,lifetime] per line.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,

    /// n,m,T,bias
    #[arg(long)]
    synthetic: Option<SyntheticSpec>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    query_every: Option<u64>,

    #[arg(long)]
    steps: Option<u64>,

    /// Metrics file; a summary goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Treat malformed or out-of-order input as fatal.
    #[arg(long)]
    strict: bool,

    /// One interaction per step.
    #[arg(long)]
    single: bool,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Cli {
    fn into_config(self) -> Result<(ExperimentConfig, bool)> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if !self.algorithm.is_empty() {
            c.algorithms = self.algorithm;
        }
        if let Some(k) = self.k {
            c.k = k;
        }
        if let Some(e) = self.epsilon {
            c.epsilon = e;
        }
        if let Some(l) = self.lifetime {
            c.lifetime = l;
        }
        if self.max_lifetime.is_some() {
            c.max_lifetime = self.max_lifetime;
        }
        if self.input.is_some() {
            c.input = self.input;
            c.synthetic = None;
        }
        if self.synthetic.is_some() {
            c.synthetic = self.synthetic;
            c.input = None;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if self.query_every.is_some() {
            c.query_every = self.query_every;
        }
        if self.steps.is_some() {
            c.steps = self.steps;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        c.strict |= self.strict;
        c.single |= self.single;
        Ok((c, self.print_config))
    }
}

fn main() -> Result<()> {
    let (config, print_config) = Cli::parse().into_config()?;
    config.validate()?;
    if print_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let result = run_experiment(&config)?;
    println!(
        "steps {}  skipped records {}{}",
        result.steps,
        result.skipped,
        config
            .out
            .as_ref()
            .map(|p| format!("  metrics {}", p.display()))
            .unwrap_or_default()
    );
    println!(
        "{:<18} {:>8} {:>12} {:>14} {:>14} {:>10} {:>10}",
        "algorithm", "queries", "mean value", "update calls", "query calls", "instances", "wall ms"
    );
    for s in &result.summaries {
        println!(
            "{:<18} {:>8} {:>12.3} {:>14} {:>14} {:>10.2} {:>10}",
            s.algorithm.to_string(),
            s.queries,
            s.mean_value,
            s.calls.update,
            s.calls.query,
            s.mean_instances,
            s.wall_micros / 1000
        );
    }
    Ok(())
}
