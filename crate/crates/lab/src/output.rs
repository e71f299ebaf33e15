//! Report serialization: JSON with a fixed envelope and RFC 4180 CSV with
//! floats rounded to 12 significant digits.

use serde::Serialize;

use crate::VERSION;

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub scenario: &'a str,
    pub kind: &'a str,
    pub version: &'a str,
    pub config_hash: &'a str,
    pub seed: u64,
    pub result: T,
}

#[derive(Debug, Clone, Copy)]
pub struct Provenance<'a> {
    pub scenario: &'a str,
    pub kind: &'a str,
    pub config_hash: &'a str,
    pub seed: u64,
}

impl<'a> Provenance<'a> {
    pub fn wrap<T: Serialize>(&self, result: T) -> Envelope<'a, T> {
        Envelope {
            scenario: self.scenario,
            kind: self.kind,
            version: VERSION,
            config_hash: self.config_hash,
            seed: self.seed,
            result,
        }
    }
}

/// Pretty JSON plus a trailing newline. Struct fields keep declaration order
/// and maps are ordered, so output is stable.
pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}

/// `v` rounded to 12 significant digits, printed in shortest form.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}
