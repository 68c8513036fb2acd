//! Result tables and their CSV serialisation.
//!
//! A file starts with one `#`-prefixed line holding a JSON metadata object,
//! followed by a header row and the data rows. Reals are printed in Rust's
//! shortest round-trip form, so equal values always give equal bytes.

use std::io::Write;
use std::path::Path;

use cyclicity_core::lead::SKEW_TOL;
use cyclicity_core::linalg::{skew_residual, Mat};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// An integer.
    Int(i64),
    /// A real number.
    Real(f64),
    /// A text label; empty for a missing value.
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Cell {
    /// The value as a real number, when it is numeric.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A rectangular table with metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// Metadata written on the leading comment line.
    pub metadata: Map<String, Value>,
}

impl ResultTable {
    /// Empty table with the given column names.
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: Map::new(),
        }
    }

    /// Appends a row, which must have one cell per column.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Config(format!(
                "row has {} cells but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Column names.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Data rows.
    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Position of a column.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column, `None` for text cells.
    pub fn column_f64(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// Header and data rows as CSV text, without the metadata line.
    pub fn data_section(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_string))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(std::io::Error::other(e)))
    }

    /// Full file contents: metadata line followed by the data section.
    pub fn to_csv(&self) -> Result<String> {
        let meta = serde_json::to_string(&Value::Object(self.metadata.clone()))?;
        Ok(format!("# {meta}\n{}", self.data_section()?))
    }

    /// Writes the file through a temporary file in the target directory that
    /// is renamed into place once complete.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let text = self.to_csv()?;
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
        Ok(())
    }
}

/// Checks that a matrix about to be written is skew-symmetric to
/// `SKEW_TOL * max(1, |A|_F)`.
pub fn require_skew(name: &str, m: &Mat) -> Result<()> {
    let residual = skew_residual(m);
    if residual > SKEW_TOL * m.norm().max(1.0) {
        return Err(CliError::Numerical(format!(
            "matrix `{name}` fails the skew check (residual {residual:e})"
        )));
    }
    Ok(())
}
