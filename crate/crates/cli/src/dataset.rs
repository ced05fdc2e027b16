//! Tabular figure data and its CSV / JSON encodings.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("row {row} has {got} values, expected {want}")]
    Ragged { row: usize, got: usize, want: usize },
    #[error("non-finite value in row {row}, column `{column}`")]
    NonFinite { row: usize, column: String },
    #[error("malformed CSV at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A rectangular table of numbers with a string-keyed metadata header.
///
/// Metadata is kept sorted by key so the serialized form is reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FigureDataset {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureDataset {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    /// Values of one column, or `None` if there is no such column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let mut seen = HashSet::new();
        for c in &self.columns {
            if !seen.insert(c.as_str()) {
                return Err(DatasetError::DuplicateColumn(c.clone()));
            }
        }
        let want = self.columns.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != want {
                return Err(DatasetError::Ragged {
                    row: i,
                    got: row.len(),
                    want,
                });
            }
            if let Some(k) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite {
                    row: i,
                    column: self.columns[k].clone(),
                });
            }
        }
        Ok(())
    }
}

/// Serializes a dataset.
///
/// CSV carries one `# key: value` line per metadata entry, then the column
/// names, then one line per row with every value at 17 significant digits.
/// JSON holds the same three fields.
pub fn emit(dataset: &FigureDataset, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => emit_csv(dataset).into_bytes(),
        Format::Json => {
            let mut out = serde_json::to_vec(dataset).expect("datasets always serialize");
            out.push(b'\n');
            out
        }
    }
}

fn emit_csv(dataset: &FigureDataset) -> String {
    let mut out = String::new();
    for (k, v) in &dataset.metadata {
        // keep every metadata entry on its own line
        let v = v.replace(['\n', '\r'], " ");
        writeln!(out, "# {k}: {v}").unwrap();
    }
    writeln!(out, "{}", dataset.columns.join(",")).unwrap();
    for row in &dataset.rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads back the CSV form written by [`emit`].
pub fn parse_csv(text: &str) -> Result<FigureDataset, DatasetError> {
    let mut ds = FigureDataset::default();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if !header_seen {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta.split_once(": ").ok_or_else(|| DatasetError::Parse {
                    line: line_no,
                    reason: "metadata line without `: `".into(),
                })?;
                ds.metadata.insert(k.to_string(), v.to_string());
                continue;
            }
            ds.columns = if line.is_empty() {
                Vec::new()
            } else {
                line.split(',').map(String::from).collect()
            };
            header_seen = true;
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DatasetError::Parse {
                line: line_no,
                reason: e.to_string(),
            })?;
        ds.rows.push(row);
    }
    if !header_seen {
        return Err(DatasetError::Parse {
            line: text.lines().count(),
            reason: "missing column row".into(),
        });
    }
    ds.validate()?;
    Ok(ds)
}
