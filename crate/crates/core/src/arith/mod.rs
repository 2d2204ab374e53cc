//! Exact integer/rational arithmetic, integer polynomials, resultants,
//! Newton polygons and complex root finding.

pub mod integer;
pub mod newton;
pub mod poly;
pub mod resultant;
pub mod roots;

pub use integer::{
    BigRat, Valuation, factor_integer, format_rat, is_prime, padic_valuation, parse_rat, rat,
    rat_int,
};
pub use newton::{RootValuation, newton_polygon_root_valuations};
pub use poly::IntPoly;
pub use resultant::{discriminant, resultant};
pub use roots::{ComplexApprox, complex_roots, mahler_measure};
