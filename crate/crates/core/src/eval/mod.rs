//! Clustering quality scores, partition agreement and report tables.

mod report;
mod scores;

pub use report::{EvaluationReport, EvaluationRow, SensitivityReport, SensitivityRow};
pub use scores::{adjusted_rand, calinski_harabasz, mantel, normalized_mutual_info, silhouette, Nmi};
