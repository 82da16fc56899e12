//! CSV artifacts and run manifests.
//!
//! Floats are written in Rust's shortest round-trip form, so identical inputs
//! give identical bytes and every value re-parses exactly.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Column names plus rows, rendered under a `#` comment header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Full file contents: comment lines, column header, rows.
    pub fn render(&self, comments: &[String]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for line in comments {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let encode = |e: csv::Error| CliError::Parse {
            path: "csv".into(),
            message: e.to_string(),
        };
        w.write_record(&self.columns).map_err(encode)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(encode)?;
        }
        w.into_inner().map_err(|e| CliError::Parse {
            path: "csv".into(),
            message: e.to_string(),
        })
    }
}

/// Header lines shared by every artifact: tool, command, units and all scenario parameters.
pub fn header_lines(scenario: &Scenario, command: &str, settings: &[(String, Value)]) -> Vec<String> {
    let mut lines = vec![
        format!("robin-dce {} {command}", env!("CARGO_PKG_VERSION")),
        "units: v = 1, lengths and times in mm, wavenumbers and frequencies in mm^-1".to_string(),
    ];
    lines.extend(scenario.parameters.iter().map(|p| format!("{} = {}", p.path, p.value)));
    lines.extend(settings.iter().map(|(k, v)| format!("{k} = {}", json_scalar(v))));
    lines
}

fn json_scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => format_float(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Ran and every check passed.
    Ok,
    /// Ran, but a check in the output failed.
    Failed,
    /// Numerical failure; the diagnostic says why.
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub source: String,
    pub command: String,
    pub status: Status,
    pub diagnostic: Option<String>,
    pub csv: Option<String>,
    pub rows: usize,
    pub threads: usize,
    pub parameters: Map<String, Value>,
    pub overrides: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub truncations: Map<String, Value>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn parameters_of(scenario: &Scenario) -> Map<String, Value> {
        scenario
            .parameters
            .iter()
            .map(|p| (p.path.clone(), p.value.to_json()))
            .collect()
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_file(path, format!("{text}\n").as_bytes())?;
    Ok(path.to_path_buf())
}
