//! Edge-list input.
//!
//! One interaction per line: `source target timestamp [lifetime]`, separated
//! by commas or whitespace. Blank lines and lines starting with `#` are
//! ignored. Distinct timestamps become consecutive steps `0, 1, 2, ...`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tdn::{RawInteraction, Timestep};

/// All interactions sharing one timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Batch {
    /// Step index after compression.
    pub step: Timestep,
    /// Timestamp as written in the input.
    pub timestamp: i64,
    pub records: Vec<RawInteraction>,
}

#[derive(Debug, Default)]
pub struct ParsedStream {
    pub batches: Vec<Batch>,
    /// Lines that were skipped, with the reason.
    pub skipped: Vec<Error>,
}

impl ParsedStream {
    pub fn interaction_count(&self) -> usize {
        self.batches.iter().map(|b| b.records.len()).sum()
    }
}

pub fn parse_stream(path: &Path, strict: bool) -> Result<ParsedStream> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_reader(BufReader::new(file), path, strict)
}

/// Parses from any reader; `path` only labels diagnostics. In strict mode
/// the first malformed or out-of-order line is fatal, otherwise malformed
/// lines are skipped and timestamps are sorted.
pub fn parse_reader(reader: impl BufRead, path: &Path, strict: bool) -> Result<ParsedStream> {
    let mut rows: Vec<(i64, RawInteraction)> = Vec::new();
    let mut skipped = Vec::new();
    let mut last: Option<i64> = None;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = parse_line(line).map_err(|message| Error::Parse {
            path: path.to_owned(),
            line: line_no,
            message,
        });
        let (ts, raw) = match parsed {
            Ok(row) => row,
            Err(e) if strict => return Err(e),
            Err(e) => {
                skipped.push(e);
                continue;
            }
        };
        if strict && last.is_some_and(|prev| ts < prev) {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: line_no,
                message: format!("timestamp {ts} goes back in time (previous {})", last.unwrap()),
            });
        }
        last = Some(ts);
        rows.push((ts, raw));
    }
    if rows.is_empty() {
        return Err(Error::EmptyStream {
            path: PathBuf::from(path),
        });
    }
    // stable, so input order survives within a timestamp
    rows.sort_by_key(|(ts, _)| *ts);

    let mut batches: Vec<Batch> = Vec::new();
    for (ts, mut raw) in rows {
        if batches.last().is_none_or(|b| b.timestamp != ts) {
            batches.push(Batch {
                step: batches.len() as Timestep,
                timestamp: ts,
                records: Vec::new(),
            });
        }
        let batch = batches.last_mut().unwrap();
        raw.time = batch.step;
        batch.records.push(raw);
    }
    Ok(ParsedStream { batches, skipped })
}

fn parse_line(line: &str) -> std::result::Result<(i64, RawInteraction), String> {
    let fields: Vec<&str> = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect();
    if !(3..=4).contains(&fields.len()) {
        return Err(format!("expected 3 or 4 fields, found {}", fields.len()));
    }
    let node = |s: &str, what: &str| s.parse::<u64>().map_err(|_| format!("{what} {s:?} is not a node id"));
    let source = node(fields[0], "source")?;
    let target = node(fields[1], "target")?;
    let ts: i64 = fields[2]
        .parse()
        .map_err(|_| format!("timestamp {:?} is not an integer", fields[2]))?;
    let mut raw = RawInteraction::new(source, target, 0);
    if let Some(l) = fields.get(3) {
        let l: i64 = l.parse().map_err(|_| format!("lifetime {l:?} is not an integer"))?;
        raw = raw.with_lifetime(l);
    }
    Ok((ts, raw))
}

/// Splits every batch into single-interaction steps, renumbered from zero.
pub fn serialize_single(batches: Vec<Batch>) -> Vec<Batch> {
    let mut out = Vec::new();
    for batch in batches {
        for mut raw in batch.records {
            let step = out.len() as Timestep;
            raw.time = step;
            out.push(Batch {
                step,
                timestamp: batch.timestamp,
                records: vec![raw],
            });
        }
    }
    out
}
