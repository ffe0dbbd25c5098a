//! Record emission in JSON lines, CSV or plain text.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

/// A flat output row. `COLUMNS` must list the serialized field names in
/// order; it doubles as the CSV header.
pub trait Record: Serialize {
    const COLUMNS: &'static [&'static str];
}

pub struct Emitter<W: Write> {
    format: Format,
    out: W,
}

impl<W: Write> Emitter<W> {
    pub fn new(format: Format, out: W) -> Self {
        Emitter { format, out }
    }

    /// Writes the CSV header for `R`; a no-op for other formats.
    pub fn header<R: Record>(&mut self) -> io::Result<()> {
        if self.format == Format::Csv {
            writeln!(self.out, "{}", R::COLUMNS.join(","))?;
        }
        Ok(())
    }

    pub fn emit<R: Record>(&mut self, record: &R) -> io::Result<()> {
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .from_writer(&mut self.out);
                w.serialize(record).map_err(io::Error::other)?;
                w.flush()
            }
            Format::Text => writeln!(self.out, "{}", text_line(record)?),
        }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

fn text_line<R: Record>(record: &R) -> io::Result<String> {
    let Value::Object(map) = serde_json::to_value(record)? else {
        return Err(io::Error::other("records serialize to objects"));
    };
    let cell = |v: &Value| match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        v => v.to_string(),
    };
    if map.len() == 1 {
        return Ok(map.values().map(cell).collect());
    }
    Ok(map
        .iter()
        .map(|(k, v)| format!("{k}={}", cell(v)))
        .collect::<Vec<_>>()
        .join(" "))
}

#[derive(Debug, Serialize)]
pub struct MinimalRecord {
    pub p: u64,
    pub c: u64,
    #[serde(rename = "minimal_H")]
    pub minimal_h: Option<u64>,
    pub h: Option<u64>,
    pub k: Option<u64>,
    pub x: Option<u64>,
    pub y: Option<u64>,
}

impl Record for MinimalRecord {
    const COLUMNS: &'static [&'static str] = &["p", "c", "minimal_H", "h", "k", "x", "y"];
}

#[derive(Debug, Serialize)]
pub struct PairRecord {
    pub p: u64,
    pub c: u64,
    pub h: Option<u64>,
    pub k: Option<u64>,
    pub x: Option<u64>,
    pub y: Option<u64>,
    pub h_max: u64,
    pub k_max: u64,
    pub tested_pairs: u64,
}

impl Record for PairRecord {
    const COLUMNS: &'static [&'static str] =
        &["p", "c", "h", "k", "x", "y", "h_max", "k_max", "tested_pairs"];
}

#[derive(Debug, Serialize)]
pub struct Theorem1Record {
    pub p: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub c: Option<u64>,
    pub verified: Option<bool>,
}

impl Record for Theorem1Record {
    const COLUMNS: &'static [&'static str] = &["p", "L", "c", "verified"];
}

#[derive(Debug, Serialize)]
pub struct SigmaRecord {
    pub p: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub sigma: u64,
}

impl Record for SigmaRecord {
    const COLUMNS: &'static [&'static str] = &["p", "L", "sigma"];
}

#[derive(Debug, Serialize)]
pub struct NpRecord {
    pub p: u64,
    pub np: u64,
}

impl Record for NpRecord {
    const COLUMNS: &'static [&'static str] = &["p", "np"];
}

/// Text output of `np` is the bare value.
#[derive(Debug, Serialize)]
pub struct Bare {
    pub np: u64,
}

impl Record for Bare {
    const COLUMNS: &'static [&'static str] = &["np"];
}

#[derive(Debug, Serialize)]
pub struct CharsumRecord {
    pub p: u64,
    pub degree: usize,
    pub value: i64,
    pub distinct_roots: usize,
    pub weil_bound: f64,
    pub weil_applicable: bool,
}

impl Record for CharsumRecord {
    const COLUMNS: &'static [&'static str] =
        &["p", "degree", "value", "distinct_roots", "weil_bound", "weil_applicable"];
}

#[derive(Debug, Serialize)]
pub struct DoublesumRecord {
    pub p: u64,
    pub from: u64,
    pub to: u64,
    pub interval_len: u64,
    pub set_len: u64,
    pub total: u64,
    pub trivial_bound: u64,
}

impl Record for DoublesumRecord {
    const COLUMNS: &'static [&'static str] =
        &["p", "from", "to", "interval_len", "set_len", "total", "trivial_bound"];
}

#[derive(Debug, Serialize)]
pub struct TriplesumRecord {
    pub p: u64,
    pub c: u64,
    pub a_len: usize,
    pub z0_len: usize,
    pub z1_len: usize,
    #[serde(rename = "S")]
    pub s: i64,
    #[serde(rename = "S_regrouped")]
    pub s_regrouped: i64,
    pub sum_w: u64,
    #[serde(rename = "W")]
    pub w: u64,
}

impl Record for TriplesumRecord {
    const COLUMNS: &'static [&'static str] =
        &["p", "c", "a_len", "z0_len", "z1_len", "S", "S_regrouped", "sum_w", "W"];
}

#[derive(Debug, Serialize)]
pub struct MemberRecord {
    pub n: u64,
}

impl Record for MemberRecord {
    const COLUMNS: &'static [&'static str] = &["n"];
}

#[derive(Debug, Serialize)]
pub struct DensityRecord {
    pub spec: String,
    #[serde(rename = "X")]
    pub x: u64,
    pub count: u64,
    pub ratio: String,
    pub dyadic_count: u64,
}

impl Record for DensityRecord {
    const COLUMNS: &'static [&'static str] = &["spec", "X", "count", "ratio", "dyadic_count"];
}

#[derive(Debug, Serialize)]
pub struct ExponentRecord {
    pub which: String,
    pub alpha: String,
    pub beta: String,
    pub k: u64,
    pub epsilon: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl Record for ExponentRecord {
    const COLUMNS: &'static [&'static str] =
        &["which", "alpha", "beta", "k", "epsilon", "lhs", "rhs", "holds"];
}

/// A scan row that could not be computed.
#[derive(Debug, Serialize)]
pub struct FailedRecord {
    pub p: u64,
    pub c: Option<u64>,
    pub error: String,
}

impl Record for FailedRecord {
    const COLUMNS: &'static [&'static str] = &["p", "c", "error"];
}
