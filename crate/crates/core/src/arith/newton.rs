//! Root valuations from the Newton polygon.

use num_traits::Zero;

use super::integer::{BigRat, Valuation, is_prime, padic_valuation_unchecked};
use super::poly::IntPoly;
use crate::error::{Error, Result};

/// Valuation of a single root: a rational, or `+∞` for roots at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootValuation {
    Finite(BigRat),
    Infinite,
}

impl RootValuation {
    pub fn finite(&self) -> Option<&BigRat> {
        match self {
            RootValuation::Finite(v) => Some(v),
            RootValuation::Infinite => None,
        }
    }
}

/// Multiset `{v_p(α)}` over the roots of `P` in `ℚ̄_p`, with multiplicity.
///
/// Slopes of the lower convex hull of `{(i, v_p(a_i))}`; a root of valuation
/// `−s` for each unit of horizontal length on a segment of slope `s`.
pub fn newton_polygon_root_valuations(p: &IntPoly, prime: u64) -> Result<Vec<RootValuation>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    Ok(root_valuations_rat(&p.rat_coeffs(), prime))
}

/// Same as [`newton_polygon_root_valuations`] for rational coefficients; prime not rechecked.
pub(crate) fn root_valuations_rat(coeffs: &[BigRat], prime: u64) -> Vec<RootValuation> {
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let v = match padic_valuation_unchecked(c, prime) {
                Valuation::Finite(v) => v,
                Valuation::Infinite => unreachable!(),
            };
            (i as i64, v)
        })
        .collect();
    let mut out = Vec::new();
    let Some(&(first, _)) = points.first() else {
        return out;
    };
    out.extend(std::iter::repeat_n(RootValuation::Infinite, first as usize));
    // Lower hull by monotone chain; points are sorted by abscissa.
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Pop while the middle point lies on or above the chord.
            let cross = (x2 - x1) as i128 * (pt.1 - y1) as i128 - (y2 - y1) as i128 * (pt.0 - x1) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let slope = BigRat::new((y2 - y1).into(), (x2 - x1).into());
        for _ in 0..(x2 - x1) {
            out.push(RootValuation::Finite(-slope.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};

    fn finite(v: &[(i64, i64)]) -> Vec<RootValuation> {
        v.iter().map(|&(n, d)| RootValuation::Finite(rat(n, d))).collect()
    }

    #[test]
    fn examples() {
        // 3x² − 3x + 1 over 3: both roots of norm 3^{1/2}
        let p = IntPoly::from_i64(&[1, -3, 3]);
        assert_eq!(newton_polygon_root_valuations(&p, 3).unwrap(), finite(&[(-1, 2), (-1, 2)]));
        // x² − 9 over 3: roots ±3
        let p = IntPoly::from_i64(&[-9, 0, 1]);
        assert_eq!(newton_polygon_root_valuations(&p, 3).unwrap(), finite(&[(1, 1), (1, 1)]));
        // x − 125 over 5
        let p = IntPoly::from_i64(&[-125, 1]);
        assert_eq!(newton_polygon_root_valuations(&p, 5).unwrap(), finite(&[(3, 1)]));
    }

    #[test]
    fn zero_roots_are_infinite() {
        let p = IntPoly::from_i64(&[0, 0, 2, 1]);
        let v = newton_polygon_root_valuations(&p, 2).unwrap();
        assert_eq!(v[..2], [RootValuation::Infinite, RootValuation::Infinite]);
        assert_eq!(v[2], RootValuation::Finite(rat_int(1)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(newton_polygon_root_valuations(&IntPoly::zero(), 3), Err(Error::ZeroPolynomial));
        assert_eq!(newton_polygon_root_valuations(&IntPoly::x(), 9), Err(Error::NotPrime(9)));
    }
}
