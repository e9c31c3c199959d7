//! CSV tables with a header row and `\n` line endings.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every finite `f64` exactly. Missing values are empty cells.

use std::path::Path;

use crate::error::{Error, Result};
use crate::integrate::DiagnosticsRow;

/// A homogeneous table of string cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::SizeMismatch { expected: self.columns.len(), got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_floats(&mut self, row: &[f64]) -> Result<()> {
        self.push(row.iter().copied().map(fmt_float).collect())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Parses a column as floats; empty cells become `None`.
    pub fn float_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self
            .column_index(name)
            .ok_or_else(|| Error::param(format!("no column named {name:?}")))?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r[i].trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::param(format!("column {name:?}: not a number: {cell:?}")))
                }
            })
            .collect()
    }

    pub fn diagnostics(rows: &[DiagnosticsRow]) -> Self {
        let mut t = Table::new(DiagnosticsRow::COLUMNS);
        for r in rows {
            t.rows.push(r.values().iter().copied().map(fmt_float).collect());
        }
        t
    }
}

pub fn write_report_csv(table: &Table, path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_report_csv(path: &Path) -> Result<Table> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(csv_err)?;
    let columns = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(csv_err)?.iter().map(String::from).collect());
    }
    Ok(Table { columns, rows })
}
