use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

pub const SCHEMA: u32 = 1;

/// Flat table used for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Single-row table from `(column, value)` pairs.
    pub fn record(pairs: &[(&str, String)]) -> Self {
        Self {
            header: pairs.iter().map(|(k, _)| k.to_string()).collect(),
            rows: vec![pairs.iter().map(|(_, v)| v.clone()).collect()],
        }
    }
}

/// Shortest representation that round-trips; `inf` and `NaN` as words.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: Table,
}

impl Report {
    pub fn new(command: &'static str, config: impl Serialize, result: impl Serialize, table: Table) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).expect("config serializes"),
            result: serde_json::to_value(result).expect("result serializes"),
            table,
        }
    }

    pub fn render(&self, format: Format) -> std::io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                });
                let mut out = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::other)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).map_err(std::io::Error::other)?;
                for row in &self.table.rows {
                    w.write_record(row).map_err(std::io::Error::other)?;
                }
                w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))
            }
        }
    }

    pub fn emit(&self, format: Format, output: Option<&Path>) -> std::io::Result<()> {
        let bytes = self.render(format)?;
        match output {
            Some(p) => std::fs::write(p, bytes),
            None => std::io::stdout().lock().write_all(&bytes),
        }
    }
}
