//! Archimedean potential theory: atomic energies, measures with potentials,
//! radial smoothing, and discrepancy estimates.

pub mod discrepancy;
pub mod kernel;
pub mod measure;
pub mod quad;
pub mod regularize;

use std::sync::OnceLock;

pub use discrepancy::{DiscrepancyReport, TestFunctionC, discrepancy_report};
pub use kernel::SmoothingKernel;
pub use measure::{
    AtomicMeasureC, EnergyValue, PointC, PotentialKind, PotentialMeasureC, energy_atomic, sampled_modulus,
    spherical_distance,
};
pub use regularize::{
    Component, P130Report, energy_regularized, energy_regularized_set, l120_check, p130_gap,
    pairing_regularized_vs_measure, positivity_check, regularized_pair,
};

/// The default smoothing kernel, constants computed once.
pub fn standard_kernel() -> &'static SmoothingKernel {
    static K: OnceLock<SmoothingKernel> = OnceLock::new();
    K.get_or_init(|| SmoothingKernel::new().expect("kernel constants converge"))
}
