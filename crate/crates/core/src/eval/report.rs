use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cluster::{FeatureSpace, Method};
use crate::error::{Error, Result};

/// Non-finite values travel as the strings "inf" / "-inf" / "nan" in JSON.
mod lenient_f64 {
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    struct Lenient;

    impl serde::de::Visitor<'_> for Lenient {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or \"inf\"")
        }

        fn visit_f64<E>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<f64, E> {
            v.trim().parse().map_err(E::custom)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(Lenient)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub method: Method,
    pub feature_space: FeatureSpace,
    pub k: usize,
    pub silhouette: f64,
    #[serde(with = "lenient_f64")]
    pub calinski_harabasz: f64,
    /// Geometry the silhouette was computed in.
    pub silhouette_space: String,
    /// Geometry the CH index was computed in.
    pub ch_space: String,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<EvaluationRow>,
}

impl EvaluationReport {
    pub fn row(&self, method: Method, feature_space: FeatureSpace) -> Option<&EvaluationRow> {
        self.rows.iter().find(|r| r.method == method && r.feature_space == feature_space)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.rows {
            if !(-1.0..=1.0).contains(&r.silhouette) {
                return Err(Error::Domain(format!("silhouette {} outside [-1, 1]", r.silhouette)));
            }
            if r.calinski_harabasz.is_nan() || r.calinski_harabasz < 0.0 {
                return Err(Error::Domain(format!("negative Calinski-Harabasz {}", r.calinski_harabasz)));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r.deserialize().collect::<std::result::Result<Vec<EvaluationRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line() as u64, message: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub param_change: String,
    pub mantel: Option<f64>,
    pub ari: Option<f64>,
    pub nmi: Option<f64>,
    /// "ok" or the error that stopped this row.
    pub status: String,
}

impl SensitivityRow {
    pub fn ok(param_change: impl Into<String>, mantel: f64, ari: f64, nmi: f64) -> Self {
        Self {
            param_change: param_change.into(),
            mantel: Some(mantel),
            ari: Some(ari),
            nmi: Some(nmi),
            status: "ok".into(),
        }
    }

    pub fn failed(param_change: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { param_change: param_change.into(), mantel: None, ari: None, nmi: None, status: reason.into() }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub baseline: String,
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// The baseline name is not stored in the CSV; the first row is taken as baseline.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r.deserialize().collect::<std::result::Result<Vec<SensitivityRow>, _>>()?;
        let baseline = rows
            .first()
            .map(|r| r.param_change.clone())
            .ok_or_else(|| Error::EmptyInput("sensitivity report has no rows".into()))?;
        Ok(Self { baseline, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
