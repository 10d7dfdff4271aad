//! Numeric sample matrix with named columns.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An `N x p` data matrix with one named column per variable.
///
/// Construction enforces: every value finite, `N > p + 1`, and unique
/// non-empty column names.
#[derive(Debug, Clone)]
pub struct Dataset {
    names: Vec<String>,
    values: DMatrix<f64>,
}

impl Dataset {
    pub fn new(names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if names.is_empty() || names.len() != values.ncols() {
            return Err(Error::Structural(format!(
                "{} column names for {} columns",
                names.len(),
                values.ncols()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Structural(format!("column {i} has an empty name")));
            }
            if names[..i].contains(a) {
                return Err(Error::Structural(format!("duplicate column name `{a}`")));
            }
        }
        if values.nrows() <= values.ncols() + 1 {
            return Err(Error::Config(format!(
                "need more than p + 1 = {} rows, got {}",
                values.ncols() + 1,
                values.nrows()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Structural("non-finite value in dataset".into()));
        }
        Ok(Self { names, values })
    }

    /// Reads an RFC-4180 CSV with a mandatory header row of variable
    /// names. Any row with an unparseable or non-finite cell fails the
    /// load, citing its 1-based line number (the header is line 1).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rd
            .headers()
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
            .iter()
            .map(|h| h.to_string())
            .collect();
        let p = names.len();
        let mut rows: Vec<f64> = Vec::new();
        let mut nrows = 0usize;
        for (i, record) in rd.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
            if record.len() != p {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {p} fields, got {}", record.len()),
                });
            }
            for (j, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("column `{}`: cannot parse `{cell}` as a number", names[j]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("column `{}`: non-finite value `{cell}`", names[j]),
                    });
                }
                rows.push(v);
            }
            nrows += 1;
        }
        let values = DMatrix::from_row_slice(nrows, p, &rows);
        Self::new(names, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(file)
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_vars(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// A new dataset containing the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.n_rows()) {
            return Err(Error::Structural("row index out of range".into()));
        }
        let mut values = DMatrix::zeros(rows.len(), self.n_vars());
        for (out, &src) in rows.iter().enumerate() {
            values.set_row(out, &self.values.row(src));
        }
        Self::new(self.names.clone(), values)
    }
}
