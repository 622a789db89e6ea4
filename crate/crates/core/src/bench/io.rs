//! CSV files written and read by the harness.
//!
//! Floats carry 17 significant digits; absent values are empty fields.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::profile::Profile;
use super::RunRecord;
use crate::direct::Variant;
use crate::error::{Error, Result};
use crate::problem::file::fmt_f64;

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>, what: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(what, e))
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|e| e.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Column name of a gate, e.g. `1e-3`.
fn gate_label(g: f64) -> String {
    format!("{g:e}")
}

const RECORD_COLUMNS: [&str; 11] = [
    "problem_id",
    "variant",
    "n",
    "budget",
    "tau",
    "initial_value",
    "best_phi",
    "evals_used",
    "gap_bound",
    "solved",
    "evals_to_solve",
];

pub fn write_records(records: &[RunRecord], out: impl Write) -> Result<()> {
    let gates = records.first().map(|r| r.gates.clone()).unwrap_or_default();
    let mut w = writer(out);
    let mut header: Vec<String> = RECORD_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(gates.iter().map(|&g| format!("gate_{}", gate_label(g))));
    header.push("error".into());
    w.write_record(&header)?;
    for r in records {
        if r.gates != gates {
            return Err(Error::Usage("records with different gates cannot share one file".into()));
        }
        let mut row = vec![
            r.problem_id.clone(),
            r.variant.to_string(),
            r.n.to_string(),
            r.budget.to_string(),
            fmt_f64(r.tau),
            opt_f64(r.initial_value.is_finite().then_some(r.initial_value)),
            opt_f64(r.best_phi.is_finite().then_some(r.best_phi)),
            r.evals_used.to_string(),
            opt_f64(r.gap_bound),
            r.solved.to_string(),
            opt_usize(r.evals_to_solve),
        ];
        row.extend(r.evals_to_gates.iter().map(|e| opt_usize(*e)));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    finish(w, "<records>")
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Invariant(format!("records file: {}", msg.into()))
}

fn parse<T: std::str::FromStr>(field: &str, name: &str) -> Result<T> {
    field.parse().map_err(|_| bad(format!("cannot parse {name} from '{field}'")))
}

fn parse_opt<T: std::str::FromStr>(field: &str, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, name).map(Some)
    }
}

/// Reads a records file; histories are left empty (see [`read_histories`]).
pub fn read_records(input: impl Read) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column '{name}'")));
    let idx: Vec<usize> = RECORD_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let gate_cols: Vec<(usize, f64)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix("gate_").map(|g| (i, g)))
        .map(|(i, g)| parse::<f64>(g, "gate").map(|g| (i, g)))
        .collect::<Result<_>>()?;
    let err_col = header.iter().position(|h| h == "error");
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let f = |k: usize| row.get(idx[k]).unwrap_or("");
        out.push(RunRecord {
            problem_id: f(0).to_string(),
            variant: f(1).parse()?,
            n: parse(f(2), "n")?,
            budget: parse(f(3), "budget")?,
            tau: parse(f(4), "tau")?,
            initial_value: parse_opt(f(5), "initial_value")?.unwrap_or(f64::NAN),
            best_phi: parse_opt(f(6), "best_phi")?.unwrap_or(f64::NAN),
            evals_used: parse(f(7), "evals_used")?,
            gap_bound: parse_opt(f(8), "gap_bound")?,
            solved: parse(f(9), "solved")?,
            evals_to_solve: parse_opt(f(10), "evals_to_solve")?,
            gates: gate_cols.iter().map(|c| c.1).collect(),
            evals_to_gates: gate_cols.iter().map(|c| parse_opt(row.get(c.0).unwrap_or(""), "gate count")).collect::<Result<_>>()?,
            history: Vec::new(),
            error: err_col.and_then(|i| row.get(i)).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(out)
}

/// `problem_id,variant,eval_count,best_phi`, one row per history point.
pub fn write_histories(records: &[RunRecord], out: impl Write) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["problem_id", "variant", "eval_count", "best_phi"])?;
    for r in records {
        for (e, v) in &r.history {
            w.write_record([r.problem_id.clone(), r.variant.to_string(), e.to_string(), fmt_f64(*v)])?;
        }
    }
    finish(w, "<histories>")
}

/// Histories keyed by `(problem_id, variant)`.
pub fn read_histories(input: impl Read) -> Result<BTreeMap<(String, Variant), Vec<(usize, f64)>>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out: BTreeMap<(String, Variant), Vec<(usize, f64)>> = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        if row.len() != 4 {
            return Err(bad("history rows need 4 fields"));
        }
        let key = (row[0].to_string(), row[1].parse()?);
        out.entry(key).or_default().push((parse(&row[2], "eval_count")?, parse(&row[3], "best_phi")?));
    }
    Ok(out)
}

/// One row per problem: `problem,n`, then for each variant its evaluation
/// counts at each gate. Unreached gates read `>budget` with the actual
/// budget, failed runs `failed`.
pub fn write_gate_table(records: &[RunRecord], variants: &[Variant], out: impl Write) -> Result<()> {
    let gates = records.first().map(|r| r.gates.clone()).unwrap_or_default();
    let mut w = writer(out);
    let mut header = vec!["problem".to_string(), "n".to_string()];
    for v in variants {
        header.extend(gates.iter().map(|&g| format!("{v}_{}", gate_label(g))));
    }
    w.write_record(&header)?;
    let mut by_problem: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_problem.entry(&r.problem_id).or_default().push(r);
    }
    for (id, recs) in by_problem {
        let mut row = vec![id.to_string(), recs[0].n.to_string()];
        for v in variants {
            match recs.iter().find(|r| r.variant == *v) {
                Some(r) if r.error.is_none() => row.extend(
                    r.evals_to_gates.iter().map(|e| e.map_or_else(|| format!(">{}", r.budget), |e| e.to_string())),
                ),
                Some(_) => row.extend(gates.iter().map(|_| "failed".to_string())),
                None => row.extend(gates.iter().map(|_| String::new())),
            }
        }
        w.write_record(&row)?;
    }
    finish(w, "<gate table>")
}

/// `variant,<abscissa>,fraction`.
pub fn write_profile(profile: &Profile, abscissa: &str, out: impl Write) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["variant", abscissa, "fraction"])?;
    for c in &profile.curves {
        for (x, y) in &c.points {
            w.write_record([c.variant.to_string(), fmt_f64(*x), fmt_f64(*y)])?;
        }
    }
    finish(w, "<profile>")
}
