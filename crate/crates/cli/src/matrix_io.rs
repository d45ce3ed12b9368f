//! Numeric matrix CSV: comma-separated, `.` decimal point, optional `#`
//! comment lines, one row per variable.

use std::fmt::Write as _;
use std::path::Path;

use rotafactor_core::Matrix;

use crate::CliError;

/// Parses matrix CSV text. `source` names the input in error messages.
pub fn parse_matrix(text: &str, source: &str) -> Result<Matrix, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row_no = rows.len() + 1;
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!(
                    "{source} line {line_no} (row {row_no}, column {}): cannot parse '{cell}' as a number",
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "{source} line {line_no} (row {row_no}, column {}): value '{cell}' is not finite",
                    col + 1
                )));
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CliError::Input(format!(
                    "{source} line {line_no} (row {row_no}): expected {w} fields, found {}",
                    row.len()
                )))
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{source}: no data rows")));
    }
    Matrix::from_rows(&rows).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_matrix(&text, &path.display().to_string())
}

/// Full-precision CSV (17 significant digits, so values re-read bit-exactly).
pub fn matrix_csv_full(m: &Matrix, header: Option<&str>) -> String {
    matrix_csv_with(m, header, |v| format!("{v:.16e}"))
}

/// Two-decimal CSV for reading by eye.
pub fn matrix_csv_rounded(m: &Matrix, header: Option<&str>) -> String {
    matrix_csv_with(m, header, |v| format!("{:.2}", clean_zero(v)))
}

fn clean_zero(v: f64) -> f64 {
    if v.abs() < 0.005 {
        0.0
    } else {
        v
    }
}

fn matrix_csv_with(m: &Matrix, header: Option<&str>, cell: impl Fn(f64) -> String) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        let _ = writeln!(out, "# {h}");
    }
    for i in 0..m.rows() {
        let cells: Vec<String> = m.row(i).iter().map(|&v| cell(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
