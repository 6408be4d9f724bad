//! Per-step metrics as comma-separated text.

use std::io::Write;

use crate::oracle::{NodeSet, OracleCounter};
use crate::tdn::Timestep;

use super::config::Algorithm;

pub const HEADER: &str = "timestep,algorithm,solution,value,update_calls,query_calls,total_calls,\
alive_edges,alive_nodes,instances,affected,wall_micros";

/// Columns that depend on the machine rather than the input.
pub const WALL_CLOCK_COLUMNS: &[&str] = &["wall_micros"];

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    pub timestep: Timestep,
    pub algorithm: Algorithm,
    pub solution: NodeSet,
    pub value: usize,
    /// Cumulative since the start of the run.
    pub calls: OracleCounter,
    pub alive_edges: usize,
    pub alive_nodes: usize,
    /// `|x_t|` for the histogram, `L` for the ring, 1 for a single sieve.
    pub instances: usize,
    /// Affected-set size `b` of the step.
    pub affected: usize,
    pub wall_micros: u64,
}

/// Time-averaged outcome of one algorithm over a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub queries: usize,
    pub mean_value: f64,
    pub calls: OracleCounter,
    pub mean_instances: f64,
    pub wall_micros: u64,
}

impl Summary {
    pub fn from_records<'a>(algorithm: Algorithm, records: impl IntoIterator<Item = &'a MetricsRecord>) -> Option<Summary> {
        let mut queries = 0;
        let (mut value, mut instances, mut wall) = (0.0, 0.0, 0);
        let mut calls = OracleCounter::default();
        for r in records.into_iter().filter(|r| r.algorithm == algorithm) {
            queries += 1;
            value += r.value as f64;
            instances += r.instances as f64;
            wall += r.wall_micros;
            calls = r.calls;
        }
        (queries > 0).then(|| Summary {
            algorithm,
            queries,
            mean_value: value / queries as f64,
            calls,
            mean_instances: instances / queries as f64,
            wall_micros: wall,
        })
    }
}

pub struct MetricsWriter<W: Write> {
    out: W,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{HEADER}")?;
        Ok(MetricsWriter { out })
    }

    pub fn record(&mut self, r: &MetricsRecord) -> std::io::Result<()> {
        let solution: Vec<String> = r.solution.iter().map(|n| n.to_string()).collect();
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.timestep,
            r.algorithm,
            solution.join(";"),
            r.value,
            r.calls.update,
            r.calls.query,
            r.calls.total(),
            r.alive_edges,
            r.alive_nodes,
            r.instances,
            r.affected,
            r.wall_micros
        )
    }

    /// A `summary` row: mean value and mean instance count over queried
    /// steps, final cumulative calls, total wall time.
    pub fn summary(&mut self, s: &Summary) -> std::io::Result<()> {
        writeln!(
            self.out,
            "summary,{},,{:.6},{},{},{},,,{:.6},,{}",
            s.algorithm,
            s.mean_value,
            s.calls.update,
            s.calls.query,
            s.calls.total(),
            s.mean_instances,
            s.wall_micros
        )
    }

    pub fn into_inner(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// The metrics text with wall-clock columns blanked, for comparing runs.
pub fn without_wall_clock(text: &str) -> String {
    let header: Vec<&str> = HEADER.split(',').collect();
    let drop: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| WALL_CLOCK_COLUMNS.contains(h))
        .map(|(i, _)| i)
        .collect();
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let fields: Vec<&str> = line
            .split(',')
            .enumerate()
            .map(|(i, f)| if drop.contains(&i) { "" } else { f })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
