//! Dense matrices as CSV: a `# rows cols` header followed by one
//! comma-separated line per row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn write_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    writeln!(out, "# {} {}", m.nrows(), m.ncols()).unwrap();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty matrix file".into() })?;
    let dims: Vec<usize> = header
        .trim()
        .strip_prefix('#')
        .ok_or(Error::Parse { line: 1, message: "expected `# rows cols` header".into() })?
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse { line: 1, message: format!("bad dimensions: {e}") })?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse { line: 1, message: "expected `# rows cols` header".into() });
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (idx, line) in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: idx + 1, message: format!("bad number: {e}") })?;
        if vals.len() != cols {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {cols} values, found {}", vals.len()),
            });
        }
        data.extend(vals);
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Parse { line: 0, message: format!("expected {rows} rows, found {seen}") });
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn save_matrix_csv(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_matrix_csv(m))?;
    Ok(())
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    parse_matrix_csv(&fs::read_to_string(path)?)
}
