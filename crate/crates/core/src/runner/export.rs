//! File formats for traces and aggregates. Traces and aggregates are JSON
//! of the full structure; the aggregate CSV has a `step,mean,stderr,n`
//! header and one row per checkpoint.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{AggregateResult, RegretTrace, RunError};

const CSV_HEADER: &str = "step,mean,stderr,n";

/// One row of an aggregate CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub step: u64,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl AggregateResult {
    pub fn rows(&self) -> Vec<AggregateRow> {
        self.checkpoints
            .iter()
            .zip(&self.mean)
            .zip(&self.stderr)
            .map(|((&step, &mean), &stderr)| AggregateRow {
                step,
                mean,
                stderr,
                n: self.n,
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        rows_to_csv(&self.rows())
    }

    pub fn save_json(&self, path: &Path) -> Result<(), RunError> {
        save_json(self, path)
    }

    pub fn load_json(path: &Path) -> Result<Self, RunError> {
        load_json(path)
    }
}

impl RegretTrace {
    pub fn save_json(&self, path: &Path) -> Result<(), RunError> {
        save_json(self, path)
    }

    pub fn load_json(path: &Path) -> Result<Self, RunError> {
        load_json(path)
    }
}

fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<(), RunError> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, RunError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn rows_to_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        // `{}` on f64 prints the shortest string that parses back exactly.
        writeln!(out, "{},{},{},{}", r.step, r.mean, r.stderr, r.n).expect("string write");
    }
    out
}

pub fn write_aggregate_csv(agg: &AggregateResult, path: &Path) -> Result<(), RunError> {
    std::fs::write(path, agg.to_csv_string())?;
    Ok(())
}

pub fn parse_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>, RunError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(RunError::Csv(format!("expected header `{CSV_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (no, line) in lines {
        let bad = |what: &str| RunError::Csv(format!("line {}: {what}", no + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let row = AggregateRow {
            step: fields[0].parse().map_err(|_| bad("bad step"))?,
            mean: fields[1].parse().map_err(|_| bad("bad mean"))?,
            stderr: fields[2].parse().map_err(|_| bad("bad stderr"))?,
            n: fields[3].parse().map_err(|_| bad("bad n"))?,
        };
        if !(row.mean.is_finite() && row.stderr.is_finite()) {
            return Err(bad("non-finite value"));
        }
        if rows.last().is_some_and(|p: &AggregateRow| p.step >= row.step) {
            return Err(bad("steps must be strictly increasing"));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(RunError::Csv("no data rows".into()));
    }
    Ok(rows)
}

pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>, RunError> {
    parse_aggregate_csv(&std::fs::read_to_string(path)?)
}
