//! Numeric CSV in and out. Comma separated, `.` decimals, and an optional
//! single header row, recognised by containing a field that is not a number.

use std::fmt::Write as _;
use std::path::Path;

use permcov::mcd::DataMatrix;
use permcov::SymMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub data: DataMatrix,
}

fn parse_field(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok()
}

pub fn parse_table(bytes: &[u8], source: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| CliError::input(format!("{source}: line {line}: {e}")))?;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(CliError::input(format!(
                    "{source}: line {line} has {} fields, expected {w}",
                    record.len()
                )));
            }
            None => width = Some(record.len()),
            _ => {}
        }
        let parsed: Vec<Option<f64>> = record.iter().map(parse_field).collect();
        if parsed.iter().any(Option::is_none) {
            if idx == 0 {
                header = Some(record.iter().map(|f| f.trim().to_string()).collect());
                continue;
            }
            let col = parsed.iter().position(Option::is_none).unwrap_or(0);
            return Err(CliError::input(format!(
                "{source}: line {line}, column {}: '{}' is not a number",
                col + 1,
                record[col].trim()
            )));
        }
        let values: Vec<f64> = parsed.into_iter().flatten().collect();
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(CliError::input(format!(
                "{source}: line {line}, column {}: non-finite value",
                col + 1
            )));
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{source}: no data rows")));
    }
    let data = DataMatrix::from_rows(&rows).map_err(|e| CliError::input(format!("{source}: {e}")))?;
    Ok(Table { header, data })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&bytes, &path.display().to_string())
}

/// Values use the shortest representation that parses back to the same
/// `f64`, so output is exact and deterministic.
fn push_row(out: &mut String, values: impl Iterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        // -0 from soft thresholding prints as 0
        let v = if v == 0.0 { 0.0 } else { v };
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

pub fn matrix_csv(m: &SymMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        push_row(&mut out, m.row(i).iter().copied());
    }
    out
}

pub fn data_csv(x: &DataMatrix, names: &[String]) -> String {
    let mut out = names.join(",");
    out.push('\n');
    for i in 0..x.n() {
        push_row(&mut out, x.row(i).iter().copied());
    }
    out
}
