use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::gaze::FeatureVector;
use crate::Technique;

pub const LABEL_COLUMN: &str = "label";
pub const GROUP_COLUMN: &str = "group";

/// A labeled feature matrix, optionally tagged with a participant group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Technique>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<Technique>) -> Result<Self, AnalyticsError> {
        let ds = Self { feature_names, rows, labels, groups: None };
        ds.validate()?;
        Ok(ds)
    }

    pub fn from_vectors(vectors: &[FeatureVector]) -> Self {
        Self {
            feature_names: crate::gaze::FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            rows: vectors.iter().map(|v| v.values.to_vec()).collect(),
            labels: vectors.iter().map(|v| v.label).collect(),
            groups: None,
        }
    }

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        if self.rows.len() != self.labels.len() {
            return Err(AnalyticsError::Shape(format!("{} rows but {} labels", self.rows.len(), self.labels.len())));
        }
        if let Some(g) = &self.groups {
            if g.len() != self.rows.len() {
                return Err(AnalyticsError::Shape(format!("{} rows but {} groups", self.rows.len(), g.len())));
            }
        }
        let width = self.feature_names.len();
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != width {
                return Err(AnalyticsError::Shape(format!("row {i} has {} values, expected {width}", r.len())));
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(AnalyticsError::InvalidValue {
                    row: i,
                    column: self.feature_names[j].clone(),
                    value: r[j].to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            groups: self.groups.as_ref().map(|g| indices.iter().map(|&i| g[i].clone()).collect()),
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Appends a feature column.
    pub fn with_feature(mut self, name: impl Into<String>, values: &[f64]) -> Result<Self, AnalyticsError> {
        if values.len() != self.rows.len() {
            return Err(AnalyticsError::Shape(format!("{} values for {} rows", values.len(), self.rows.len())));
        }
        self.feature_names.push(name.into());
        for (r, v) in self.rows.iter_mut().zip(values) {
            r.push(*v);
        }
        Ok(self)
    }

    pub fn class_counts(&self) -> BTreeMap<Technique, usize> {
        count_labels(&self.labels)
    }

    /// Reads a feature matrix: every column except `label` and `group` is a
    /// numeric feature.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, AnalyticsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let label_ix = headers
            .iter()
            .position(|h| h == LABEL_COLUMN)
            .ok_or_else(|| AnalyticsError::MissingColumn(LABEL_COLUMN.into()))?;
        let group_ix = headers.iter().position(|h| h == GROUP_COLUMN);
        let feature_ix: Vec<usize> = (0..headers.len()).filter(|&i| i != label_ix && Some(i) != group_ix).collect();
        let feature_names: Vec<String> = feature_ix.iter().map(|&i| headers[i].to_string()).collect();

        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut groups = group_ix.map(|_| Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut values = Vec::with_capacity(feature_ix.len());
            for (&i, name) in feature_ix.iter().zip(&feature_names) {
                let raw = rec.get(i).unwrap_or("");
                let v: f64 = raw.parse().map_err(|_| AnalyticsError::InvalidValue {
                    row,
                    column: name.clone(),
                    value: raw.to_string(),
                })?;
                values.push(v);
            }
            let raw = rec.get(label_ix).unwrap_or("");
            let label = raw.parse::<Technique>().map_err(|_| AnalyticsError::UnknownLabel { row, value: raw.to_string() })?;
            rows.push(values);
            labels.push(label);
            if let (Some(g), Some(ix)) = (groups.as_mut(), group_ix) {
                g.push(rec.get(ix).unwrap_or("").to_string());
            }
        }
        let ds = Dataset { feature_names, rows, labels, groups };
        ds.validate()?;
        Ok(ds)
    }

    pub fn parse_csv(text: &str) -> Result<Dataset, AnalyticsError> {
        Self::read_csv(text.as_bytes())
    }
}

pub fn count_labels(labels: &[Technique]) -> BTreeMap<Technique, usize> {
    let mut m = BTreeMap::new();
    for l in labels {
        *m.entry(*l).or_insert(0) += 1;
    }
    m
}

/// Fraction of positions where the two label sequences agree.
pub fn accuracy(predicted: &[Technique], truth: &[Technique]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
