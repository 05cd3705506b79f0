//! Verdict records and the two report sinks.
//!
//! Every check the harness runs becomes one row. Rows serialize to JSON
//! lines (`{"theorem", "params", "lhs", "rhs", "holds", "seed"}`) with the
//! full context in `params`, and aggregate into a CSV summary with one row
//! per (field, support, suite, theorem) keeping the tightest trial. Output
//! is byte-deterministic: ordered maps, shortest-round-trip floats, no
//! wall-clock anywhere.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Value as Json};

use crate::error::Result;

/// Exact integer when the theorem side is an integer, double otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lhs {
    Int(i128),
    Float(f64),
}

impl Lhs {
    pub fn to_json(self) -> Json {
        match self {
            Lhs::Int(v) => {
                if let Ok(small) = i64::try_from(v) {
                    json!(small)
                } else {
                    json!(v.to_string())
                }
            }
            Lhs::Float(v) => json!(v),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Lhs::Int(v) => v as f64,
            Lhs::Float(v) => v,
        }
    }

    fn csv_cell(self) -> String {
        match self {
            Lhs::Int(v) => v.to_string(),
            Lhs::Float(v) => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerdictRow {
    pub field: String,
    pub support: String,
    pub suite: String,
    pub theorem: String,
    pub params: BTreeMap<String, Json>,
    pub lhs: Lhs,
    pub rhs: f64,
    pub holds: bool,
    pub seed: u64,
}

impl VerdictRow {
    pub fn to_jsonl(&self) -> String {
        let mut params = self.params.clone();
        params.insert("field".into(), json!(self.field));
        params.insert("support".into(), json!(self.support));
        params.insert("suite".into(), json!(self.suite));
        let line = json!({
            "theorem": self.theorem,
            "params": params,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs,
            "holds": self.holds,
            "seed": self.seed,
        });
        line.to_string()
    }
}

pub fn write_jsonl<W: Write>(rows: &[VerdictRow], out: &mut W) -> Result<()> {
    for row in rows {
        writeln!(out, "{}", row.to_jsonl())?;
    }
    Ok(())
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// CSV summary: per (field, support, suite, theorem) the row with the least
/// slack rhs − lhs (the tightest instance), with `holds` the conjunction
/// over all its rows. Group order follows first appearance.
pub fn write_csv_summary<W: Write>(rows: &[VerdictRow], out: &mut W) -> Result<()> {
    writeln!(out, "field,support,suite,theorem,lhs,rhs,holds,seed")?;
    let mut order: Vec<(String, String, String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String, String, String), (usize, bool)> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let key = (
            row.field.clone(),
            row.support.clone(),
            row.suite.clone(),
            row.theorem.clone(),
        );
        match groups.get_mut(&key) {
            None => {
                order.push(key.clone());
                groups.insert(key, (i, row.holds));
            }
            Some((best, all_hold)) => {
                *all_hold &= row.holds;
                let slack = |r: &VerdictRow| r.rhs - r.lhs.as_f64();
                if slack(row) < slack(&rows[*best]) {
                    *best = i;
                }
            }
        }
    }
    for key in order {
        let (best, all_hold) = groups[&key];
        let row = &rows[best];
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_escape(&row.field),
            csv_escape(&row.support),
            csv_escape(&row.suite),
            csv_escape(&row.theorem),
            csv_escape(&row.lhs.csv_cell()),
            row.rhs,
            all_hold,
            row.seed
        )?;
    }
    Ok(())
}
