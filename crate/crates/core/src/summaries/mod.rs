//! Diagram vectorisations and distances between diagrams.

mod assignment;
mod vectorize;
mod wasserstein;

pub use assignment::min_cost_assignment;
pub use vectorize::{
    barcode, betti_curve, betti_curve_on_grid, landscape, landscape_on_grid, uniform_grid, BettiCurve, Interval,
    PersistenceLandscape,
};
pub use wasserstein::{bottleneck, diagram_distance_matrix, wasserstein, WassersteinParams};
