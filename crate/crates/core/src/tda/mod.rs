//! Delay embedding and Vietoris–Rips persistent homology.

mod diagram;
mod distance;
mod embed;
mod pca;
mod rips;

pub use diagram::{read_diagrams_csv, write_diagrams_csv, PersistenceDiagram, PersistencePair};
pub use distance::{euclidean, pairwise_distances, row_distances, DistanceMatrix};
pub use embed::{delay_embed, PointCloud};
pub use pca::{pca_project, Projection};
pub use rips::{default_eps_max, rips_persistence, rips_simplices};
