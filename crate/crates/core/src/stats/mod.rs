//! Classical statistical features of a return panel.

mod correlation;
mod matrix;
mod stl;

pub use correlation::{
    average_ranks, covariance_matrix, cross_correlation_matrix, lagged_correlation, pearson, pearson_matrix,
    spearman_matrix, variance_summary,
};
pub use matrix::SymmetricMatrix;
pub use stl::{stl_decompose, StlConfig, StlDecomposition};
