use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kmeans,
    Hierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSpace {
    Statistical,
    Tda,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kmeans => "kmeans",
            Method::Hierarchical => "hierarchical",
        })
    }
}

impl fmt::Display for FeatureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSpace::Statistical => "statistical",
            FeatureSpace::Tda => "tda",
        })
    }
}

/// Item -> cluster id map. Ids are contiguous `0..k`, numbered by first
/// appearance in item order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub items: Vec<String>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: Method,
    pub feature_space: FeatureSpace,
    /// Within-cluster sum of squares (k-means only).
    pub inertia: Option<f64>,
}

/// Renumber arbitrary ids to `0..k` by first appearance.
pub fn canonical_labels(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|r| {
            let next = map.len();
            *map.entry(*r).or_insert(next)
        })
        .collect()
}

impl ClusterAssignment {
    pub fn new(items: Vec<String>, raw_labels: &[usize], method: Method, feature_space: FeatureSpace) -> Result<Self> {
        if items.len() != raw_labels.len() {
            return Err(Error::DimensionMismatch(format!("{} items for {} labels", items.len(), raw_labels.len())));
        }
        let labels = canonical_labels(raw_labels);
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Ok(Self { items, labels, k, method, feature_space, inertia: None })
    }

    /// Members of each cluster, in item order.
    pub fn clusters(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.k];
        for (item, &l) in self.items.iter().zip(&self.labels) {
            out[l].push(item.clone());
        }
        out
    }

    pub fn label_of(&self, item: &str) -> Option<usize> {
        self.items.iter().position(|i| i == item).map(|p| self.labels[p])
    }

    /// `b`'s labels reordered to follow `self.items`.
    pub fn aligned_labels(&self, other: &ClusterAssignment) -> Result<Vec<usize>> {
        if self.items.len() != other.items.len() {
            return Err(Error::MismatchedItems(format!("{} vs {} items", self.items.len(), other.items.len())));
        }
        self.items
            .iter()
            .map(|item| other.label_of(item).ok_or_else(|| Error::MismatchedItems(format!("`{item}` missing"))))
            .collect()
    }

    /// `item,label` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["currency", "label"])?;
        for (item, l) in self.items.iter().zip(&self.labels) {
            out.write_record([item.clone(), l.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, method: Method, feature_space: FeatureSpace) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut items = Vec::new();
        let mut labels = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            items.push(rec.get(0).unwrap_or("").to_string());
            labels.push(
                rec.get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or(Error::Parse { line, message: "bad cluster label".into() })?,
            );
        }
        Self::new(items, &labels, method, feature_space)
    }
}
