//! CSV tables with round-trip number formatting, and the run manifest.

use std::io;
use std::path::Path;

use serde::Serialize;

/// Shortest decimal that parses back to the same `f64`; exponent form for
/// very large or small magnitudes.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: Option<bool>) -> String {
    match b {
        Some(true) => "pass".into(),
        Some(false) => "fail".into(),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.render())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub command: String,
    pub seed: Option<u64>,
    pub threads: usize,
    pub duration_ms: u128,
    pub tool_version: String,
}
