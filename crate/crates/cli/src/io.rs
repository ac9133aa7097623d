//! Matrix files and trajectory tables.
//!
//! A matrix file is `{"rows": m, "cols": n, "data": [[re, im], ...]}` in row-major order.
//! Floats are written in shortest round-trip form and parsed with correct rounding, so
//! `parse(serialize(m)) == m` bit for bit whenever `m` is finite.

use std::path::Path;

use jordan_geo::{Matrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    /// Fails on non-finite entries, which JSON cannot carry.
    pub fn from_matrix(m: &Matrix) -> Result<Self, CliError> {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(CliError::Domain(
                        "result contains non-finite entries".into(),
                    ));
                }
                data.push([z.re, z.im]);
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn into_matrix(self) -> Result<Matrix, CliError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CliError::Input(
                "matrix must have at least one row and one column".into(),
            ));
        }
        let expected = self
            .rows
            .checked_mul(self.cols)
            .ok_or_else(|| CliError::Input("matrix dimensions overflow".into()))?;
        if self.data.len() != expected {
            return Err(CliError::Input(format!(
                "expected {expected} entries for a {}x{} matrix, found {}",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(Matrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }
}

pub fn parse_matrix(text: &str) -> Result<Matrix, CliError> {
    let file: MatrixFile = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("invalid matrix file: {e}")))?;
    file.into_matrix()
}

pub fn matrix_to_json(m: &Matrix) -> Result<String, CliError> {
    let file = MatrixFile::from_matrix(m)?;
    serde_json::to_string(&file).map_err(|e| CliError::Domain(e.to_string()))
}

pub fn matrix_value(m: &Matrix) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(MatrixFile::from_matrix(m)?).map_err(|e| CliError::Domain(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `t, z_0_re, z_0_im, …` followed by the extra column names, joined by `", "`.
pub fn trajectory_header(entries: usize, extra: &[&str]) -> String {
    let mut cols = vec!["t".to_string()];
    for k in 0..entries {
        cols.push(format!("z_{k}_re"));
        cols.push(format!("z_{k}_im"));
    }
    cols.extend(extra.iter().map(|s| s.to_string()));
    cols.join(", ")
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// One table row: `t`, the row-major entries of `m`, then `extra`.
pub fn trajectory_row(t: f64, m: &Matrix, extra: &[String]) -> String {
    let mut cols = vec![fmt_f64(t)];
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            cols.push(fmt_f64(m[(i, j)].re));
            cols.push(fmt_f64(m[(i, j)].im));
        }
    }
    cols.extend(extra.iter().cloned());
    cols.join(", ")
}
