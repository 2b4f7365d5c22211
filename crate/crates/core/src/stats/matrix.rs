use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Labelled square matrix with `values[i][j] == values[j][i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    labels: Vec<String>,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Build from `entry(i, j)`, evaluated once per unordered pair `i <= j`.
    pub fn from_fn(labels: Vec<String>, mut entry: impl FnMut(usize, usize) -> T) -> Self {
        let n = labels.len();
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self { labels, values }
    }

    /// Build from precomputed upper-triangle entries in row order (`i < j`) and a diagonal.
    pub fn from_upper(labels: Vec<String>, diagonal: T, upper: &[T]) -> Result<Self> {
        let n = labels.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::DimensionMismatch(format!("{} upper entries for n={n}", upper.len())));
        }
        let mut it = upper.iter();
        Ok(Self::from_fn(labels, |i, j| if i == j { diagonal } else { *it.next().expect("sized above") }))
    }

    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("matrix is not {n}x{n}")));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Domain(format!("matrix not symmetric at ({}, {})", labels[i], labels[j])));
                }
            }
        }
        Ok(Self { labels, values: rows.into_iter().flatten().collect() })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.labels.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get_by_label(&self, a: &str, b: &str) -> Option<T> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.get(i, j))
    }

    /// Entries strictly above the diagonal, row by row.
    pub fn upper_triangle(&self) -> Vec<T> {
        let n = self.len();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| self.get(i, j)).collect()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { labels: self.labels.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `label,<l1>,<l2>,...` header followed by one labelled row per item.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["label".to_string()];
        header.extend(self.labels.iter().cloned());
        out.write_record(&header)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let labels: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let row = rec
                .iter()
                .skip(1)
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .and_then(T::from_f64)
                        .ok_or_else(|| Error::Parse { line, message: format!("bad number `{f}`") })
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        Self::from_rows(labels, rows)
    }

    pub fn to_json(&self) -> String {
        let n = self.len();
        let json = MatrixJson {
            labels: self.labels.clone(),
            values: (0..n).map(|i| self.row(i).iter().map(|v| v.to_f64_lossy()).collect()).collect(),
        };
        serde_json::to_string_pretty(&json).expect("matrix serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line() as u64, message: e.to_string() })?;
        let rows = json.values.into_iter().map(|r| r.into_iter().map(T::of).collect()).collect();
        Self::from_rows(json.labels, rows)
    }
}
