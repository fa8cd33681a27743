//! CSV output with a one-line JSON echo of the run configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

pub fn write_csv_to<W: Write>(
    mut w: W,
    config: &Value,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    if let Some(i) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(CliError::Internal(format!(
            "row {i} has {} fields, header has {}",
            rows[i].len(),
            header.len()
        )));
    }
    writeln!(w, "# {config}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row.iter().map(Cell::render))?;
    }
    csv.flush()?;
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn write_csv(
    path: Option<&Path>,
    config: &Value,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?;
            write_csv_to(BufWriter::new(f), config, header, rows)
        }
        None => write_csv_to(io::stdout().lock(), config, header, rows),
    }
}
