//! Report documents and their JSON and CSV encodings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::Usage;

pub const TOOL: &str = "unitfield";
pub const OUT_DIR_ENV: &str = "UNITFIELD_OUT_DIR";

#[derive(Serialize)]
pub struct ReportDocument<'a, P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a [String],
    /// RFC 3339, or null under `--deterministic`.
    pub timestamp: Option<String>,
    pub payload: P,
}

/// One CSV table: a header and rows of cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => fmt_num(*v),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        w.into_inner().context("flushing csv")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Plain-text table (repro only).
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        }
    }
}

/// Where a report goes: stdout, an explicit file, or a default file name
/// under the output directory.
pub struct Sink {
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Sink {
    fn target(&self, default_name: &str, format: Format) -> Option<PathBuf> {
        match (&self.output, &self.out_dir) {
            (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
            (Some(p), _) => Some(p.clone()),
            (None, Some(d)) => Some(d.join(format!("{default_name}.{}", format.extension()))),
            (None, None) => None,
        }
    }

    pub fn write(&self, default_name: &str, format: Format, bytes: &[u8]) -> Result<()> {
        match self.target(default_name, format) {
            Some(path) => write_file(&path, bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub struct Emitter<'a> {
    pub command: &'a [String],
    pub deterministic: bool,
    pub format: Option<Format>,
    pub sink: Sink,
}

impl Emitter<'_> {
    pub fn json_bytes<P: Serialize>(&self, payload: P) -> Result<Vec<u8>> {
        let doc = ReportDocument {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            timestamp: (!self.deterministic).then(|| chrono::Utc::now().to_rfc3339()),
            payload,
        };
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Emit `payload` as JSON or `table` as CSV, per the requested format.
    pub fn emit<P: Serialize>(&self, name: &str, payload: P, table: impl FnOnce() -> Table) -> Result<()> {
        match self.format.unwrap_or(Format::Json) {
            Format::Json => self.sink.write(name, Format::Json, &self.json_bytes(payload)?),
            Format::Csv => self.sink.write(name, Format::Csv, &table().to_bytes()?),
            Format::Table => Err(Usage("--format table is only available for repro".into()).into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.471007, f64::MAX] {
            let s = fmt_num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn csv_header_and_quoting() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a,b".into(), 0.5.into()]);
        let s = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(s, "name,value\n\"a,b\",5.0000000000000000e-1\n");
    }
}
