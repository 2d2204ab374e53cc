//! Places of ℚ, algebraic sets, local energy pairings and adelic heights.

pub mod adelic;
pub mod pairing;
pub mod place;
pub mod set;

pub use adelic::{
    AdelicMeasure, LocalMeasureSpec, WeilComparison, adelic_height, adelic_height_by_places, local_height_term,
    mahler_formula_general, naive_height, naive_height_mahler, potential_difference_sup, weil_comparison_bound,
};
pub use pairing::{
    LocalMeasure, LocalPairing, PairingValue, good_place_energy, integral_log_monic, pairing_finite_sets,
    pairing_set_vs_measure, self_pairing_from_roots,
};
pub use place::{Place, log_norm_at_place, norm_at_place, product_formula_residual};
pub use set::AlgebraicSet;
