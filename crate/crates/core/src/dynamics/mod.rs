//! Rational maps over ℚ: reduction, escape rates, canonical heights,
//! equilibrium sampling, periodic points and parameter space.

pub mod basilica;
pub mod cross_ratio;
pub mod green;
pub mod holder;
pub mod mandelbrot;
pub mod map;
pub mod periodic;
pub mod sample;

pub use basilica::{BasilicaReport, CodingSequence, basilica_local_energy};
pub use cross_ratio::{RationalAtoms, TransformationCheck, cross_ratio, transformation_check};
pub use green::{
    GreenValue, HeightEstimate, bad_primes, canonical_height_point, canonical_height_set, forward_orbit,
    green_local, height_constant, image_set,
};
pub use holder::{HolderEstimate, holder_exponent};
pub use mandelbrot::{
    bifurcation_green, critical_orbit_poly, critical_param_cloud, critical_root_mean, critically_finite_params,
    mandel_height, PARAM_DEGREE_BUDGET,
};
pub use map::{ProjPoint, RationalMapQ};
pub use periodic::{PERIODIC_DEGREE_BUDGET, PeriodicPoints, periodic_points, periodic_points_report};
pub use sample::{equilibrium_local_measure, equilibrium_sample, polynomial_escape_rate, preimages};

use crate::arith::integer::{int_valuation, is_prime};
use crate::error::{Error, Result};

/// True when the reduction of the normalized lift mod `p` still has degree `D`.
pub fn good_reduction(r: &RationalMapQ, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(int_valuation(&r.homogeneous_resultant()?, p) == 0)
}
