//! Flat-file emission. CSV files start with `#` comment lines carrying the
//! tool version, the schema name and the config hash; floats are written with
//! 17 significant digits so they round-trip.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::OutputFormat;
use crate::error::CliError;

pub const TOOL_VERSION: &str = concat!("bandpip ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(&'static str),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(*s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub schema: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            schema,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// `<prefix>_<stem>.<ext>`; parent directories are created on demand.
pub fn output_path(prefix: &Path, stem: &str, format: OutputFormat) -> PathBuf {
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let name = match prefix.file_name() {
        Some(base) => format!("{}_{stem}.{ext}", base.to_string_lossy()),
        None => format!("{stem}.{ext}"),
    };
    prefix.with_file_name(name)
}

pub fn write_table(path: &Path, table: &Table, format: OutputFormat, config_hash: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => {
            writeln!(out, "# {TOOL_VERSION}")?;
            writeln!(out, "# schema: {}", table.schema)?;
            writeln!(out, "# config_hash: sha256:{config_hash}")?;
            let mut writer = csv::Writer::from_writer(&mut out);
            writer.write_record(table.columns)?;
            for row in &table.rows {
                writer.write_record(row.iter().map(Cell::to_csv))?;
            }
            writer.flush()?;
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| ((*k).to_string(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "tool": TOOL_VERSION,
                "schema": table.schema,
                "config_hash": format!("sha256:{config_hash}"),
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
