//! Deterministic table output. Floats are always printed with 17 significant
//! digits so runs are reproducible byte for byte; lines end with LF on every
//! platform.

use crate::config::OutputFormat;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// One table cell. Optional values print as nan / na in CSV and null in
/// JSON-lines.
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    MaybeFloat(Option<f64>),
    MaybeBool(Option<bool>),
}

/// 17 significant digits round-trips every f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Float(x) => fmt_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::MaybeFloat(Some(x)) => fmt_float(*x),
        Cell::MaybeFloat(None) => "nan".into(),
        Cell::MaybeBool(Some(b)) => b.to_string(),
        Cell::MaybeBool(None) => "na".into(),
    }
}

/// JSON value; NaN has no JSON encoding so it degrades to null.
fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Float(x) if x.is_nan() => "null".into(),
        Cell::Float(x) => fmt_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::MaybeFloat(Some(x)) if x.is_nan() => "null".into(),
        Cell::MaybeFloat(Some(x)) => fmt_float(*x),
        Cell::MaybeFloat(None) => "null".into(),
        Cell::MaybeBool(Some(b)) => b.to_string(),
        Cell::MaybeBool(None) => "null".into(),
    }
}

pub struct TableWriter {
    out: BufWriter<File>,
    format: OutputFormat,
    columns: &'static [&'static str],
    path: PathBuf,
}

impl TableWriter {
    /// Creates `<dir>/<stem>.csv` or `<dir>/<stem>.jsonl` and, for CSV,
    /// writes the header line.
    pub fn create(
        dir: &Path,
        stem: &str,
        format: OutputFormat,
        columns: &'static [&'static str],
    ) -> std::io::Result<TableWriter> {
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        };
        let path = dir.join(format!("{stem}.{ext}"));
        let mut out = BufWriter::new(File::create(&path)?);
        if format == OutputFormat::Csv {
            out.write_all(columns.join(",").as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(TableWriter {
            out,
            format,
            columns,
            path,
        })
    }

    pub fn row(&mut self, cells: &[Cell]) -> std::io::Result<()> {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        match self.format {
            OutputFormat::Csv => {
                let fields: Vec<String> = cells.iter().map(csv_cell).collect();
                writeln!(self.out, "{}", fields.join(","))
            }
            OutputFormat::JsonLines => {
                let fields: Vec<String> = self
                    .columns
                    .iter()
                    .zip(cells)
                    .map(|(name, cell)| format!("\"{name}\":{}", json_cell(cell)))
                    .collect();
                writeln!(self.out, "{{{}}}", fields.join(","))
            }
        }
    }

    /// Flushes and returns the written path for reporting.
    pub fn finish(mut self) -> std::io::Result<PathBuf> {
        self.out.flush()?;
        Ok(self.path)
    }
}
