use std::fs::File;
use std::io::BufWriter;
use std::time::Instant;

use crate::baselines::{greedy, lazy_greedy, random_k};
use crate::error::{Error, Result};
use crate::histogram::HistApprox;
use crate::oracle::{CallKind, NodeSet, Oracle};
use crate::reduction::BasicReduction;
use crate::sieve::SieveState;
use crate::tdn::{Edge, Interaction, Lifetime, LifetimeAssigner, TdnGraph};

use super::config::{Algorithm, ExperimentConfig};
use super::metrics::{MetricsRecord, MetricsWriter, Summary};
use super::stream::{parse_stream, serialize_single, Batch};
use super::synthetic::generate_synthetic;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<MetricsRecord>,
    pub summaries: Vec<Summary>,
    /// Steps actually replayed.
    pub steps: u64,
    /// Input records dropped (malformed lines, self-loops, bad lifetimes).
    pub skipped: usize,
}

impl ExperimentResult {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }
}

/// The batches a configuration replays, after `--single` and `--steps`,
/// plus the number of input lines skipped while parsing.
pub fn load_batches(config: &ExperimentConfig) -> Result<(Vec<Batch>, usize)> {
    let (mut batches, skipped) = match (&config.input, &config.synthetic) {
        (Some(path), _) => {
            let parsed = parse_stream(path, config.strict)?;
            for e in &parsed.skipped {
                eprintln!("warning: skipped {e}");
            }
            (parsed.batches, parsed.skipped.len())
        }
        (None, Some(spec)) => (generate_synthetic(spec, config.seed), 0),
        (None, None) => return Err(Error::Config("no input file or synthetic spec given".into())),
    };
    if config.single {
        batches = serialize_single(batches);
    }
    if let Some(steps) = config.steps {
        batches.truncate(steps as usize);
    }
    Ok((batches, skipped))
}

/// Loads the configured stream, replays it and writes the metrics file if
/// an output path is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let (batches, skipped) = load_batches(config)?;
    let mut result = run_batches(config, &batches)?;
    result.skipped += skipped;
    if let Some(path) = &config.out {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        write_metrics(BufWriter::new(file), &result)?;
    }
    Ok(result)
}

pub fn write_metrics(out: impl std::io::Write, result: &ExperimentResult) -> Result<()> {
    let mut w = MetricsWriter::new(out)?;
    for r in &result.records {
        w.record(r)?;
    }
    for s in &result.summaries {
        w.summary(s)?;
    }
    w.into_inner()?;
    Ok(())
}

enum Runner {
    Sieve(SieveState),
    Basic(BasicReduction),
    Hist(HistApprox),
    Greedy,
    LazyGreedy,
    Random,
    BruteForce,
}

struct Lane {
    algorithm: Algorithm,
    runner: Runner,
    oracle: Oracle,
    affected: usize,
}

impl Lane {
    fn new(algorithm: Algorithm, config: &ExperimentConfig) -> Result<Lane> {
        let (k, eps) = (config.k, config.epsilon);
        let max = config.effective_max_lifetime();
        let need_max = || max.ok_or_else(|| Error::Config(format!("{algorithm} requires a maximum lifetime")));
        let runner = match algorithm {
            Algorithm::SieveAdn => Runner::Sieve(SieveState::new(k, eps)?),
            Algorithm::BasicReduction => Runner::Basic(BasicReduction::new(k, eps, need_max()?)?),
            Algorithm::HistApprox => Runner::Hist(HistApprox::new(k, eps, need_max()?)?),
            Algorithm::HistApproxExact => Runner::Hist(HistApprox::new(k, eps, need_max()?)?.refine_head(true)),
            Algorithm::Greedy => Runner::Greedy,
            Algorithm::LazyGreedy => Runner::LazyGreedy,
            Algorithm::Random => Runner::Random,
            Algorithm::BruteForce => Runner::BruteForce,
        };
        Ok(Lane {
            algorithm,
            runner,
            oracle: Oracle::new(),
            affected: 0,
        })
    }

    fn process(&mut self, graph: &TdnGraph, edges: &[Edge]) -> Result<()> {
        let oracle = &mut self.oracle;
        match &mut self.runner {
            Runner::Sieve(s) => self.affected = s.feed(&graph.view(), oracle, edges).affected,
            Runner::Basic(r) => {
                r.process(graph, oracle, edges)?;
                self.affected = r.last_affected();
            }
            Runner::Hist(h) => {
                h.process(graph, oracle, edges)?;
                self.affected = h.last_affected();
            }
            _ => {}
        }
        Ok(())
    }

    fn query(&mut self, graph: &TdnGraph, k: usize, seed: u64) -> Result<(NodeSet, usize)> {
        let view = graph.view();
        let oracle = &mut self.oracle;
        let prev = oracle.set_kind(CallKind::Query);
        let answer = match &mut self.runner {
            Runner::Sieve(s) => Ok(s.current_solution(graph)),
            Runner::Basic(r) => Ok(r.query(graph)),
            Runner::Hist(h) => {
                let a = h.query(graph, oracle);
                Ok((a.solution, a.value))
            }
            Runner::Greedy => Ok(greedy(&view, oracle, k)),
            Runner::LazyGreedy => Ok(lazy_greedy(&view, oracle, k)),
            Runner::Random => {
                let set = random_k(&view, k, seed);
                let value = oracle.spread(&view, &set);
                Ok((set, value))
            }
            Runner::BruteForce => oracle.brute_force_opt(&view, k),
        };
        oracle.set_kind(prev);
        answer
    }

    fn advance(&mut self) {
        match &mut self.runner {
            Runner::Basic(r) => r.advance(),
            Runner::Hist(h) => h.advance(),
            _ => {}
        }
    }

    fn instances(&self) -> usize {
        match &self.runner {
            Runner::Sieve(_) => 1,
            Runner::Basic(r) => r.instance_count(),
            Runner::Hist(h) => h.instance_count(),
            _ => 0,
        }
    }
}

/// Replays `batches` through every configured algorithm. Lifetimes are
/// assigned once per record, so all algorithms see the same stream.
pub fn run_batches(config: &ExperimentConfig, batches: &[Batch]) -> Result<ExperimentResult> {
    config.validate()?;
    let max = config.effective_max_lifetime();
    let mut assigner = LifetimeAssigner::new(config.policy(), lifetime_seed(config.seed))?;
    let mut graph = TdnGraph::new();
    if let Some(max) = max {
        graph = graph.with_max_lifetime(max);
    }
    let mut lanes = config
        .algorithms
        .iter()
        .map(|&a| Lane::new(a, config))
        .collect::<Result<Vec<_>>>()?;

    let steps = batches.len() as u64;
    let cadence = config.query_cadence(steps);
    let mut records = Vec::new();
    let mut skipped = 0;
    for batch in batches {
        let t = graph.now();
        let (mut accepted, rejected) = assigner.assign(&batch.records);
        let mut dropped: Vec<Error> = rejected;
        if let Some(max) = max {
            accepted.retain(|e: &Interaction| {
                if e.lifetime > Lifetime::Finite(max) {
                    dropped.push(Error::LifetimeExceedsMax {
                        lifetime: e.lifetime,
                        max,
                    });
                    false
                } else {
                    true
                }
            });
        }
        if config.strict {
            if let Some(first) = dropped.into_iter().next() {
                return Err(first);
            }
        }
        skipped += batch.records.len() - accepted.len();
        let edges = graph.insert_batch(accepted.into_iter().map(|mut e| {
            e.arrival = t;
            e
        }))?;

        let query = t.is_multiple_of(cadence);
        for lane in &mut lanes {
            let started = Instant::now();
            lane.process(&graph, &edges)?;
            let answer = if query {
                Some(lane.query(&graph, config.k, random_seed(config.seed, t))?)
            } else {
                None
            };
            let wall = started.elapsed().as_micros() as u64;
            if let Some((solution, value)) = answer {
                records.push(MetricsRecord {
                    timestep: t,
                    algorithm: lane.algorithm,
                    solution,
                    value,
                    calls: lane.oracle.counter(),
                    alive_edges: graph.alive_edge_count(),
                    alive_nodes: graph.alive_node_count(),
                    instances: lane.instances(),
                    affected: lane.affected,
                    wall_micros: wall,
                });
            }
            lane.advance();
        }
        graph.advance_time();
    }

    let summaries = config
        .algorithms
        .iter()
        .filter_map(|&a| Summary::from_records(a, &records))
        .collect();
    Ok(ExperimentResult {
        records,
        summaries,
        steps,
        skipped,
    })
}

fn lifetime_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn random_seed(seed: u64, t: u64) -> u64 {
    seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(t)
}
