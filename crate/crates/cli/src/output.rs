use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::args::{BasisCmd, CacheCmd, Command, DimsCmd, GraphsCmd, VerifyCmd};
use crate::cache::FORMAT_VERSION;
use crate::commands::Outcome;

pub const SCHEMA: &str = "mcgcalc/1";

pub fn json(out: &Outcome, timing_ms: Option<u128>, error: Option<&str>) -> serde_json::Result<String> {
    let mut report = json!({
        "schema": SCHEMA,
        "format_version": FORMAT_VERSION,
        "command": out.command,
        "params": out.params,
        "result": out.result,
        "provenance": out.provenance,
        "passed": out.passed,
        "cache_hits": out.cache_hits,
        "timing_ms": timing_ms,
    });
    if let Some(e) = error {
        report["error"] = json!(e);
    }
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

/// One CSV row per result row; nested values are written as JSON text.
pub fn csv(out: &Outcome) -> Result<String, csv::Error> {
    let rows: Vec<Map<String, Value>> = match &out.result {
        Value::Array(items) => items.iter().flat_map(flatten_row).collect(),
        Value::Null => Vec::new(),
        other => flatten_row(other),
    };
    let mut columns: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for r in &rows {
        for k in r.keys() {
            if seen.insert(k.clone()) {
                columns.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if !columns.is_empty() {
        w.write_record(&columns)?;
    }
    for r in &rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| match r.get(c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            })
            .collect();
        w.write_record(&cells)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn flatten_row(v: &Value) -> Vec<Map<String, Value>> {
    match v {
        Value::Object(m) => vec![m.clone()],
        Value::Array(items) => items.iter().flat_map(flatten_row).collect(),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other.clone());
            vec![m]
        }
    }
}

pub fn command_name(cmd: &Command) -> String {
    let sub = match cmd {
        Command::Dims { what } => match what {
            DimsCmd::Chord(_) => "dims chord",
            DimsCmd::Lie(_) => "dims lie",
            DimsCmd::H { .. } => "dims h",
            DimsCmd::J(_) => "dims j",
            DimsCmd::Weyl { .. } => "dims weyl",
        },
        Command::Verify { what } => match what {
            VerifyCmd::SumRelation(_) => "verify sum-relation",
            VerifyCmd::PkIdempotent { .. } => "verify pk-idempotent",
            VerifyCmd::Table(_) => "verify table",
            VerifyCmd::Decompositions(_) => "verify decompositions",
            VerifyCmd::TraceProps { .. } => "verify trace-props",
            VerifyCmd::QMap(_) => "verify q-map",
            VerifyCmd::Prop47(_) => "verify prop4-7",
            VerifyCmd::Prop65(_) => "verify prop6-5",
            VerifyCmd::Prop66(_) => "verify prop6-6",
            VerifyCmd::Abelianization(_) => "verify abelianization",
            VerifyCmd::Invariance(_) => "verify invariance",
        },
        Command::Graphs { what } => match what {
            GraphsCmd::Enumerate { .. } => "graphs enumerate",
            GraphsCmd::Ranks(_) => "graphs ranks",
            GraphsCmd::Relation { .. } => "graphs relation",
            GraphsCmd::E1(_) => "graphs e1",
        },
        Command::HInvariants { .. } => "h-invariants",
        Command::Basis { what: BasisCmd::Export { .. } } => "basis export",
        Command::Cache { what: CacheCmd::Gc { .. } } => "cache gc",
    };
    sub.to_string()
}
