//! The labelled feature matrix shared by every pipeline stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary label, +1 or −1.
pub type Label = i8;

/// Rectangular feature matrix with ±1 labels and named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        let d = feature_names.len();
        if rows.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!(
                    "row {i} has {} features, header names {d}",
                    row.len()
                )));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1 && y != -1 {
                return Err(Error::Data(format!("label at row {i} is {y}, expected +1 or -1")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &feature_names {
            if !seen.insert(name) {
                return Err(Error::Data(format!("duplicate feature name {name:?}")));
            }
        }
        Ok(Dataset { feature_names, rows, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// (count of +1, count of −1).
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (pos, self.labels.len() - pos)
    }

    /// The label with fewer rows; ties resolve to +1.
    pub fn minority_label(&self) -> Label {
        let (pos, neg) = self.class_counts();
        if pos <= neg {
            1
        } else {
            -1
        }
    }

    /// Keep only the named feature columns, in the order given.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Dataset> {
        for &i in indices {
            if i >= self.n_features() {
                return Err(Error::Index(format!(
                    "feature index {i} out of range for {} features",
                    self.n_features()
                )));
            }
        }
        Ok(Dataset {
            feature_names: indices.iter().map(|&i| self.feature_names[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| indices.iter().map(|&i| r[i]).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    /// Extract the rows at `indices`, preserving order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        for &i in indices {
            if i >= self.n_rows() {
                return Err(Error::Index(format!(
                    "row index {i} out of range for {} rows",
                    self.n_rows()
                )));
            }
        }
        Ok(Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        })
    }
}
