use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arith::integer::BigRat;
use crate::arith::poly::IntPoly;
use crate::arith::roots::{ComplexApprox, complex_roots};
use crate::error::{Error, Result};

/// Root tolerance used to fill the cache.
pub const ROOT_TOL: f64 = 1e-13;
/// Weakest certified radius accepted when `ROOT_TOL` is out of reach in double precision.
pub const ROOT_TOL_FALLBACK: f64 = 1e-9;

/// A Galois-stable finite subset of `ℙ¹(ℚ̄)`: the roots of a primitive
/// squarefree integer polynomial, optionally together with `∞`.
#[derive(Clone)]
pub struct AlgebraicSet {
    min_poly: IntPoly,
    contains_infinity: bool,
    roots: OnceLock<Vec<ComplexApprox>>,
}

impl PartialEq for AlgebraicSet {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.contains_infinity == other.contains_infinity
    }
}

impl Eq for AlgebraicSet {}

impl fmt::Debug for AlgebraicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraicSet")
            .field("min_poly", &self.min_poly)
            .field("contains_infinity", &self.contains_infinity)
            .finish()
    }
}

impl AlgebraicSet {
    /// The polynomial is made primitive with positive leading coefficient.
    /// A constant polynomial stands for the empty finite part.
    pub fn new(poly: &IntPoly, contains_infinity: bool) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut p = poly.primitive_part();
        if p.lc().is_negative() {
            p = -&p;
        }
        if p.degree() == 0 && !contains_infinity {
            return Err(Error::InvalidMeasure("empty set".into()));
        }
        if p.degree() > 0 && p.gcd(&p.derivative()).degree() > 0 {
            return Err(Error::NotSquarefree);
        }
        Ok(AlgebraicSet { min_poly: p, contains_infinity, roots: OnceLock::new() })
    }

    pub fn from_poly(poly: &IntPoly) -> Result<Self> {
        Self::new(poly, false)
    }

    pub fn rational(q: &BigRat) -> Self {
        Self::new(&IntPoly::linear_root(q), false).expect("linear polynomials are squarefree")
    }

    pub fn infinity() -> Self {
        Self::new(&IntPoly::one(), true).expect("constant with ∞")
    }

    /// The `N`-th roots of unity, roots of `x^N − 1`.
    pub fn roots_of_unity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegreeTooSmall(0));
        }
        let p = &IntPoly::monomial(BigInt::one(), n) - &IntPoly::one();
        Self::from_poly(&p)
    }

    /// Attaches externally computed roots, e.g. from a higher-precision solver.
    pub fn with_roots(self, roots: Vec<ComplexApprox>) -> Result<Self> {
        if roots.len() != self.min_poly.degree() {
            return Err(Error::InvalidMeasure(format!(
                "{} roots supplied for degree {}",
                roots.len(),
                self.min_poly.degree()
            )));
        }
        let cell = OnceLock::new();
        let _ = cell.set(roots);
        Ok(AlgebraicSet { roots: cell, ..self })
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn contains_infinity(&self) -> bool {
        self.contains_infinity
    }

    /// Number of finite points.
    pub fn finite_len(&self) -> usize {
        self.min_poly.degree()
    }

    /// `|F|`, counting `∞` when present.
    pub fn len(&self) -> usize {
        self.finite_len() + usize::from(self.contains_infinity)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Complex approximations of the finite points, computed once.
    pub fn roots(&self) -> Result<&[ComplexApprox]> {
        if let Some(r) = self.roots.get() {
            return Ok(r);
        }
        let r = if self.finite_len() == 0 {
            Vec::new()
        } else {
            match complex_roots(&self.min_poly, ROOT_TOL) {
                Err(Error::RootsNotConverged { best_bound, .. }) if best_bound <= ROOT_TOL_FALLBACK => {
                    complex_roots(&self.min_poly, (4.0 * best_bound).min(ROOT_TOL_FALLBACK))?
                }
                other => other?,
            }
        };
        Ok(self.roots.get_or_init(|| r))
    }

    /// True when the two finite parts share a point.
    pub fn meets(&self, other: &AlgebraicSet) -> bool {
        self.finite_len() > 0 && other.finite_len() > 0 && self.min_poly.gcd(&other.min_poly).degree() > 0
    }

    /// `|F|` as an exact rational.
    pub(crate) fn size_rat(&self) -> BigRat {
        BigRat::from_integer(BigInt::from(self.len()))
    }
}

impl fmt::Display for AlgebraicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "roots({})", self.min_poly.to_coeff_string())?;
        if self.contains_infinity {
            f.write_str(" + inf")?;
        }
        Ok(())
    }
}
