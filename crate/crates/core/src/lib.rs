//! Statistical and topological clustering of foreign-exchange reference rates.
//!
//! The pipeline runs from dated rate CSVs through monthly log-returns to two
//! feature spaces: standardised return vectors, and Vietoris-Rips persistence
//! diagrams of delay-embedded series compared by Wasserstein distance. Both
//! spaces feed k-means and complete-linkage clustering, scored by the `eval`
//! module.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the usual choice.

pub mod cluster;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod linalg;
pub mod scalar;
pub mod stats;
pub mod summaries;
pub mod tda;

mod table;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type RateSeriesF64 = ingest::RateSeries<f64>;
pub type RatePanelF64 = ingest::RatePanel<f64>;
pub type ReturnPanelF64 = ingest::ReturnPanel<f64>;
pub type SymmetricMatrixF64 = stats::SymmetricMatrix<f64>;
pub type StlDecompositionF64 = stats::StlDecomposition<f64>;
pub type PointCloudF64 = tda::PointCloud<f64>;
pub type DistanceMatrixF64 = tda::DistanceMatrix<f64>;
pub type PersistenceDiagramF64 = tda::PersistenceDiagram<f64>;
pub type PersistenceLandscapeF64 = summaries::PersistenceLandscape<f64>;
pub type BettiCurveF64 = summaries::BettiCurve<f64>;
pub type WassersteinParamsF64 = summaries::WassersteinParams<f64>;
pub type DendrogramF64 = cluster::Dendrogram<f64>;
pub type KMeansFitF64 = cluster::KMeansFit<f64>;
pub type MdsEmbeddingF64 = cluster::MdsEmbedding<f64>;
