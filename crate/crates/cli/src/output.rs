use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl Cell {
    // 17 significant digits: every f64 survives a text round trip.
    fn to_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(_) => s.serialize_none(),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    #[serde(skip)]
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Float(v)).collect());
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(&self.columns).map_err(|e| csv_error(path, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field))
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

/// Everything a command produced, before it touches the disk.
#[derive(Debug, Clone)]
pub struct Report {
    pub results: serde_json::Value,
    pub tables: Vec<Table>,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    results: &'a serde_json::Value,
    artifacts: Vec<String>,
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

/// Writes the tables and `<command>_summary.json` into `out_dir`.
/// Returns the summary path.
pub fn write_report(config: &RunConfig, report: &Report, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let cmd = config.command.name();
    let mut artifacts = Vec::new();
    for table in &report.tables {
        let ext = match config.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let file = format!("{cmd}_{}.{ext}", table.name);
        let path = out_dir.join(&file);
        match config.format {
            Format::Csv => table.write_csv(&path)?,
            Format::Json => {
                let mut text = serde_json::to_string(table).expect("tables always serialize");
                text.push('\n');
                write_bytes(&path, text.as_bytes())?;
            }
        }
        artifacts.push(file);
    }

    let summary = RunSummary {
        command: cmd,
        version: env!("CARGO_PKG_VERSION"),
        config,
        results: &report.results,
        artifacts,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summaries always serialize");
    text.push('\n');
    let path = out_dir.join(format!("{cmd}_summary.json"));
    write_bytes(&path, text.as_bytes())?;
    Ok(path)
}

/// Reads `(x, p)` pairs from a CSV with an `x` column and a `p_a` (or
/// `p_a_exact`) column.
pub fn read_population_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let bad = |message: String| CliError::Format {
        path: path.to_path_buf(),
        message,
    };
    let ix = find("x").ok_or_else(|| bad("missing column x".into()))?;
    let ip = find("p_a")
        .or_else(|| find("p_a_exact"))
        .ok_or_else(|| bad("missing column p_a".into()))?;

    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("").trim();
            raw.parse()
                .map_err(|_| bad(format!("row {}: cannot parse {raw:?}", line + 2)))
        };
        out.push((field(ix)?, field(ip)?));
    }
    Ok(out)
}
