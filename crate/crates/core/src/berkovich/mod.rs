//! The Berkovich projective line over ℚ_p, restricted to points with rational
//! centers and rational log-radii.

pub mod measure;
pub mod point;
pub mod tree;

pub use measure::{AtomicMeasureB, LogP, energy_atomic_b, l320_check};
pub use point::{
    BerkPoint, ExtRat, PointKind, PointType, base_change_residual, chordal_metric, gromov_product,
    hyperbolic_distance, is_below, log_sup, median, project_eps, wedge,
};
pub use tree::{
    FiniteTree, TreeFunction, TreeLocation, Truncation, cauchy_schwarz_check, energy_flux, laplacian_tree,
    potential_of, tree_dirichlet, tree_pairing,
};
