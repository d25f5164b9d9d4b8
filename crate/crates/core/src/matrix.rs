//! The input system `A`: an `n x m` matrix with unit rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;

const ZERO_ROW: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-9;
/// Rows further than this from unit norm trigger a load warning.
pub const LOAD_WARN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitRowMatrix {
    m: usize,
    data: Vec<f64>,
}

/// JSON file layout: `{"m": .., "n": .., "rows": [[..], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl UnitRowMatrix {
    /// Divide every row by its norm. Row order is preserved.
    pub fn normalize_rows(m: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("ambient dimension {m} < 2")));
        }
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * m);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {m}",
                    r.len()
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("row {i} has non-finite entries")));
            }
            let nr = norm(r);
            if nr <= ZERO_ROW {
                return Err(Error::DegenerateRow { row: i });
            }
            data.extend(r.iter().map(|x| x / nr));
        }
        Ok(UnitRowMatrix { m, data })
    }

    /// Accept rows that are already unit length (within `1e-9`).
    pub fn from_unit_rows(m: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() == m && (norm(r) - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!("row {i} is not unit length")));
            }
        }
        Self::normalize_rows(m, &rows)
    }

    pub(crate) fn from_flat_unchecked(m: usize, data: Vec<f64>) -> Self {
        debug_assert!(data.len() % m == 0);
        UnitRowMatrix { m, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Rows reordered by `perm` (`new[i] = old[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            data.extend_from_slice(self.row(p));
        }
        UnitRowMatrix { m: self.m, data }
    }

    /// `A Q` for a row-major `m x m` matrix `q`.
    pub fn transformed(&self, q: &[f64]) -> Self {
        let m = self.m;
        let mut data = vec![0.0; self.data.len()];
        for (r, row) in self.rows().enumerate() {
            for j in 0..m {
                data[r * m + j] = (0..m).map(|k| row[k] * q[k * m + j]).sum();
            }
        }
        let rows: Vec<Vec<f64>> = data.chunks_exact(m).map(<[f64]>::to_vec).collect();
        // renormalize away the roundoff of Q
        Self::normalize_rows(m, &rows).expect("orthogonal image of unit rows")
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile { m: self.m, n: self.n(), rows: self.to_rows() }
    }
}

/// A matrix read from disk plus any normalization warnings.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub matrix: UnitRowMatrix,
    pub warnings: Vec<String>,
}

fn finish_load(m: usize, rows: Vec<Vec<f64>>) -> Result<Loaded> {
    let warnings = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| (norm(r) - 1.0).abs() > LOAD_WARN_TOL)
        .map(|(i, r)| format!("row {i} has norm {}; normalized", norm(r)))
        .collect();
    let matrix = UnitRowMatrix::normalize_rows(m, &rows)?;
    Ok(Loaded { matrix, warnings })
}

/// One row per line, comma-separated decimals. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_csv(text: &str) -> Result<Loaded> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let m = rows.first().map(Vec::len).ok_or_else(|| Error::Parse("empty matrix".into()))?;
    finish_load(m, rows)
}

pub fn parse_json(text: &str) -> Result<Loaded> {
    let f: MatrixFile = serde_json::from_str(text)?;
    if f.rows.len() != f.n {
        return Err(Error::Parse(format!("n = {} but {} rows given", f.n, f.rows.len())));
    }
    finish_load(f.m, f.rows)
}

/// Dispatch on extension: `.json` is JSON, anything else CSV.
pub fn load_matrix(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json(&text),
        _ => parse_csv(&text),
    }
}
