//! k-means, complete-linkage agglomeration and classical MDS.

mod assignment;
mod hierarchical;
mod kmeans;
mod mds;

pub use assignment::{canonical_labels, ClusterAssignment, FeatureSpace, Method};
pub use hierarchical::{complete_linkage, hierarchical_complete, Dendrogram, Merge};
pub use kmeans::{elbow_curve, KMeans, KMeansFit};
pub use mds::{classical_mds, MdsEmbedding};
