//! Report pipeline for statistical vs. topological clustering of FX rates.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod sensitivity;

pub use config::PipelineConfig;
pub use error::{Stage, StageError};
pub use pipeline::{compute, run_pipeline, RunResult};
pub use sensitivity::run_sensitivity;
