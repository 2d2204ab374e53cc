use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::map::{ProjPoint, RationalMapQ};
use crate::arith::integer::{BigRat, ln_abs_rat, padic_valuation_unchecked, Valuation};
use crate::arith::newton::{RootValuation, newton_polygon_root_valuations};
use crate::arith::poly::IntPoly;
use crate::arith::roots::complex_roots;
use crate::berkovich::LogP;
use crate::complex::measure::ordered_sum;
use crate::error::{Error, Result};
use crate::heights::{LocalPairing, PairingValue, Place};

/// A finitely supported probability measure on `ℚ`: `(point, weight)` pairs.
pub type RationalAtoms = [(BigRat, BigRat)];

const PREIMAGE_TOL: f64 = 1e-13;

/// `(z, w)_v = −log|z − w|_v` for distinct rationals, in `log p` units at finite places.
fn point_pairing(z: &BigRat, w: &BigRat, v: Place) -> Result<(f64, BigRat)> {
    let diff = z - w;
    if diff.is_zero() {
        return Err(Error::Inadmissible(format!("z = w = {z}")));
    }
    Ok(match v {
        Place::Archimedean => (-ln_abs_rat(&diff), BigRat::zero()),
        Place::Finite(p) => match padic_valuation_unchecked(&diff, p) {
            Valuation::Finite(k) => (0.0, BigRat::from_integer(k.into())),
            Valuation::Infinite => unreachable!("nonzero difference"),
        },
    })
}

/// `(z₀, z₁, w₀, w₁)_v = (z₀,w₀) + (z₁,w₁) − (z₀,w₁) − (z₁,w₀)` with `(z,w) = −log|z−w|_v`.
///
/// Terms involving `∞` are dropped, so `(z₀, ∞, w₀, w₁) = (z₀,w₀) − (z₀,w₁)`.
pub fn cross_ratio(z0: &ProjPoint, z1: &ProjPoint, w0: &ProjPoint, w1: &ProjPoint, v: Place) -> Result<LocalPairing> {
    for z in [z0, z1] {
        for w in [w0, w1] {
            if z == w {
                return Err(Error::Inadmissible(format!("z_i = w_j = {z}")));
            }
        }
    }
    let mut numeric = Vec::with_capacity(4);
    let mut exact = BigRat::zero();
    for (z, w, sign) in [(z0, w0, 1.0), (z1, w1, 1.0), (z0, w1, -1.0), (z1, w0, -1.0)] {
        let (Some(zr), Some(wr)) = (z.to_rat(), w.to_rat()) else { continue };
        let (f, e) = point_pairing(&zr, &wr, v)?;
        numeric.push(sign * f);
        if sign > 0.0 {
            exact += e;
        } else {
            exact -= e;
        }
    }
    Ok(match v {
        Place::Archimedean => LocalPairing {
            place: v,
            value: PairingValue::Numeric { value: ordered_sum(numeric), tol: 1e-15 },
        },
        Place::Finite(p) => LocalPairing { place: v, value: PairingValue::Exact(LogP::new(p, exact)) },
    })
}

/// Both sides of the transformation formula
/// `(R_*μ₀, R_*μ₁, ν₀, ν₁)_v = D^{−1} (μ₀, μ₁, R^*ν₀, R^*ν₁)_v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformationCheck {
    pub place: Place,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `lhs − rhs` as an exact multiple of `log p` at finite places.
    pub exact_residual: Option<LogP>,
}

fn validate(mu: &RationalAtoms) -> Result<()> {
    if mu.is_empty() || mu.iter().any(|(_, w)| !w.is_positive()) {
        return Err(Error::InvalidMeasure("atoms need positive weights".into()));
    }
    let total: BigRat = mu.iter().map(|(_, w)| w.clone()).sum();
    if !total.is_one() {
        return Err(Error::InvalidMeasure(format!("total mass {total}")));
    }
    Ok(())
}

/// `S(z, w) = Σ_{R(a) = w} (z, a)_v` over the `D` preimages with multiplicity.
fn preimage_sum(r: &RationalMapQ, z: &BigRat, w: &BigRat, v: Place) -> Result<(f64, BigRat)> {
    let q = &r.num().scale(w.denom()) - &r.den().scale(w.numer());
    if q.degree() < r.degree() {
        return Err(Error::Inadmissible(format!("{w} has a preimage at infinity")));
    }
    match v {
        Place::Archimedean => {
            let zc = crate::arith::integer::rat_to_f64(z);
            let roots = complex_roots(&q, PREIMAGE_TOL)?;
            let terms: Vec<f64> = roots.iter().map(|a| -(a.value() - zc).norm().ln()).collect();
            if terms.iter().any(|t| !t.is_finite()) {
                return Err(Error::Inadmissible(format!("{z} is a preimage of {w}")));
            }
            Ok((ordered_sum(terms), BigRat::zero()))
        }
        Place::Finite(p) => {
            // roots of the shifted polynomial are a − z
            let shifted: IntPoly = q.shift_rational(z);
            let mut acc = BigRat::zero();
            for rv in newton_polygon_root_valuations(&shifted, p)? {
                match rv {
                    RootValuation::Finite(s) => acc += s,
                    RootValuation::Infinite => {
                        return Err(Error::Inadmissible(format!("{z} is a preimage of {w}")));
                    }
                }
            }
            Ok((0.0, acc))
        }
    }
}

/// Evaluates both sides on atomic probability measures with rational atoms.
pub fn transformation_check(
    r: &RationalMapQ,
    mu0: &RationalAtoms,
    mu1: &RationalAtoms,
    nu0: &RationalAtoms,
    nu1: &RationalAtoms,
    v: Place,
) -> Result<TransformationCheck> {
    for m in [mu0, mu1, nu0, nu1] {
        validate(m)?;
    }
    let image = |z: &BigRat| {
        r.apply_rat(z).ok_or_else(|| Error::Inadmissible(format!("R({z}) = ∞")))
    };
    let mut cache: HashMap<(usize, usize, usize, usize), (f64, BigRat)> = HashMap::new();
    let mut s = |zi: usize, zj: usize, wi: usize, wj: usize| -> Result<(f64, BigRat)> {
        if let Some(x) = cache.get(&(zi, zj, wi, wj)) {
            return Ok(x.clone());
        }
        let z = if zi == 0 { &mu0[zj].0 } else { &mu1[zj].0 };
        let w = if wi == 0 { &nu0[wj].0 } else { &nu1[wj].0 };
        let x = preimage_sum(r, z, w, v)?;
        cache.insert((zi, zj, wi, wj), x.clone());
        Ok(x)
    };
    let (mut lhs_f, mut rhs_f) = (Vec::new(), Vec::new());
    let (mut lhs_e, mut rhs_e) = (BigRat::zero(), BigRat::zero());
    for (i0, (z0, m0)) in mu0.iter().enumerate() {
        let rz0 = image(z0)?;
        for (i1, (z1, m1)) in mu1.iter().enumerate() {
            let rz1 = image(z1)?;
            for (j0, (w0, n0)) in nu0.iter().enumerate() {
                for (j1, (w1, n1)) in nu1.iter().enumerate() {
                    let weight = m0 * m1 * n0 * n1;
                    let wf = crate::arith::integer::rat_to_f64(&weight);
                    let pts = |q: &BigRat| ProjPoint::from_rat(q);
                    let left = cross_ratio(&pts(&rz0), &pts(&rz1), &pts(w0), &pts(w1), v)?;
                    match &left.value {
                        PairingValue::Exact(l) => lhs_e += &weight * &l.coeff,
                        PairingValue::Numeric { value, .. } => lhs_f.push(wf * value),
                    }
                    // D^{-1} Σ_{k0,k1} (z0, z1, a0^{k0}, a1^{k1}) = S(z0,w0) + S(z1,w1) − S(z0,w1) − S(z1,w0)
                    let parts = [
                        (s(0, i0, 0, j0)?, 1),
                        (s(1, i1, 1, j1)?, 1),
                        (s(0, i0, 1, j1)?, -1),
                        (s(1, i1, 0, j0)?, -1),
                    ];
                    for ((f, e), sign) in parts {
                        if sign > 0 {
                            rhs_f.push(wf * f);
                            rhs_e += &weight * e;
                        } else {
                            rhs_f.push(-wf * f);
                            rhs_e -= &weight * e;
                        }
                    }
                }
            }
        }
    }
    Ok(match v {
        Place::Archimedean => {
            let (lhs, rhs) = (ordered_sum(lhs_f), ordered_sum(rhs_f));
            TransformationCheck { place: v, lhs, rhs, residual: lhs - rhs, exact_residual: None }
        }
        Place::Finite(p) => {
            let (l, rr) = (LogP::new(p, lhs_e), LogP::new(p, rhs_e));
            let res = LogP::new(p, &l.coeff - &rr.coeff);
            TransformationCheck { place: v, lhs: l.to_f64(), rhs: rr.to_f64(), residual: res.to_f64(), exact_residual: Some(res) }
        }
    })
}
