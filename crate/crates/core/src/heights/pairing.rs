use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::place::Place;
use super::set::AlgebraicSet;
use crate::arith::integer::{BigRat, int_valuation, ln_abs_rat, padic_valuation_unchecked};
use crate::arith::newton::{RootValuation, root_valuations_rat};
use crate::arith::poly::IntPoly;
use crate::arith::resultant::{cross_root_difference_product, ordered_root_difference_product};
use crate::berkovich::{AtomicMeasureB, BerkPoint, ExtRat, LogP, PointKind, energy_atomic_b};
use crate::complex::measure::{PotentialMeasureC, ordered_sum};
use crate::error::{Error, Result};

/// Declared accuracy of archimedean values built from cached roots.
pub const ARCH_TOL: f64 = 1e-9;

/// Value of a local pairing: exact at finite places, approximate at ∞.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PairingValue {
    Exact(LogP),
    Numeric { value: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalPairing {
    pub place: Place,
    pub value: PairingValue,
}

impl LocalPairing {
    pub(crate) fn exact(prime: u64, coeff: BigRat) -> Self {
        LocalPairing { place: Place::Finite(prime), value: PairingValue::Exact(LogP::new(prime, coeff)) }
    }

    pub(crate) fn numeric(value: f64, tol: f64) -> Self {
        LocalPairing { place: Place::Archimedean, value: PairingValue::Numeric { value, tol } }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.value {
            PairingValue::Exact(l) => l.to_f64(),
            PairingValue::Numeric { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<&LogP> {
        match &self.value {
            PairingValue::Exact(l) => Some(l),
            PairingValue::Numeric { .. } => None,
        }
    }

    pub fn tol(&self) -> f64 {
        match &self.value {
            PairingValue::Exact(_) => 0.0,
            PairingValue::Numeric { tol, .. } => *tol,
        }
    }
}

impl fmt::Display for LocalPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            PairingValue::Exact(l) => write!(f, "{l}"),
            PairingValue::Numeric { value, tol } => write!(f, "{value} ± {tol:e}"),
        }
    }
}

/// A probability measure with continuous potential at one place.
#[derive(Debug, Clone)]
pub enum LocalMeasure {
    Archimedean(PotentialMeasureC),
    Finite(AtomicMeasureB),
}

impl LocalMeasure {
    /// `λ_v`: the unit circle at ∞, the Gauss point at `p`.
    pub fn lambda(v: Place) -> Self {
        match v {
            Place::Archimedean => LocalMeasure::Archimedean(PotentialMeasureC::lambda_circle()),
            Place::Finite(p) => LocalMeasure::Finite(AtomicMeasureB::lambda(p).expect("place carries a prime")),
        }
    }

    pub fn place(&self) -> Place {
        match self {
            LocalMeasure::Archimedean(_) => Place::Archimedean,
            LocalMeasure::Finite(m) => Place::Finite(m.prime()),
        }
    }

    /// Probability with no classical or infinite atoms, so the potential is continuous.
    pub fn validate(&self) -> Result<()> {
        if let LocalMeasure::Finite(m) = self {
            if !m.is_probability() {
                return Err(Error::InvalidMeasure("finite-place measure must be a probability".into()));
            }
            if m.atoms().iter().any(|(s, _)| !s.is_hyperbolic()) {
                return Err(Error::InvalidMeasure("atoms must be of type II or III".into()));
            }
        }
        Ok(())
    }

    /// `(ρ_v, ρ_v)_v`.
    pub fn self_energy(&self) -> Result<LocalPairing> {
        match self {
            LocalMeasure::Archimedean(m) => m
                .self_energy()
                .map(|e| LocalPairing::numeric(e, ARCH_TOL))
                .ok_or_else(|| Error::Unsupported("archimedean self-energy unknown".into())),
            LocalMeasure::Finite(m) => {
                let e = energy_atomic_b(m, m)?;
                Ok(LocalPairing::exact(e.prime, e.coeff))
            }
        }
    }

    pub fn is_lambda(&self) -> bool {
        match self {
            LocalMeasure::Archimedean(m) => *m.kind() == crate::complex::PotentialKind::LambdaCircle,
            LocalMeasure::Finite(m) => BerkPoint::gauss(m.prime()).map(|g| *m == AtomicMeasureB::dirac(g)).unwrap_or(false),
        }
    }
}

fn check_place(f_place: Place, v: Place) -> Result<()> {
    if f_place != v {
        return Err(Error::InvalidMeasure(format!("measure lives at {f_place}, pairing requested at {v}")));
    }
    Ok(())
}

fn val(q: &BigRat, p: u64) -> i64 {
    padic_valuation_unchecked(q, p).finite().expect("nonzero by construction")
}

/// `([F], [G])_v` for Galois-stable sets; `∞` atoms are dropped but `|F|`
/// still counts them.
pub fn pairing_finite_sets(f: &AlgebraicSet, g: &AlgebraicSet, v: Place) -> Result<LocalPairing> {
    let same = f == g;
    if !same && f.meets(g) {
        return Err(Error::OverlappingSupports);
    }
    let norm = f.size_rat() * g.size_rat();
    let prod = if f.finite_len() == 0 || g.finite_len() == 0 {
        BigRat::from_integer(1.into())
    } else if same {
        ordered_root_difference_product(f.min_poly())?
    } else {
        cross_root_difference_product(f.min_poly(), g.min_poly())?
    };
    Ok(match v {
        Place::Finite(p) => LocalPairing::exact(p, BigRat::from_integer(val(&prod, p).into()) / norm),
        Place::Archimedean => {
            let n = crate::arith::integer::rat_to_f64(&norm);
            LocalPairing::numeric(-ln_abs_rat(&prod) / n, 1e-14 * (1.0 + ln_abs_rat(&prod).abs()))
        }
    })
}

/// `([F],[F])_v` by the double sum over cached roots.
pub fn self_pairing_from_roots(f: &AlgebraicSet) -> Result<f64> {
    let r = f.roots()?;
    let mut terms = Vec::with_capacity(r.len() * r.len());
    for (i, a) in r.iter().enumerate() {
        for (j, b) in r.iter().enumerate() {
            if i != j {
                terms.push(-(a.value() - b.value()).norm().ln());
            }
        }
    }
    let n = f.len() as f64;
    Ok(ordered_sum(terms) / (n * n))
}

/// `Σ_{α ∈ F} log_p sup{α, S}` from the Newton polygon of `P(x + c)`.
pub fn sum_log_sup_roots(f: &AlgebraicSet, s: &BerkPoint) -> Result<ExtRat> {
    let p = s.prime();
    let (center, logr) = match s.kind() {
        PointKind::Infinity => {
            return Ok(if f.finite_len() == 0 { ExtRat::Finite(BigRat::zero()) } else { ExtRat::PosInf });
        }
        PointKind::Classical(c) => (c.clone(), None),
        PointKind::Ball { center, logr } => (center.clone(), Some(logr.clone())),
    };
    let shifted = f.min_poly().shift_rational(&center);
    let mut acc = BigRat::zero();
    for rv in root_valuations_rat(&shifted.rat_coeffs(), p) {
        let l = match rv {
            RootValuation::Finite(v) => ExtRat::Finite(-v),
            RootValuation::Infinite => ExtRat::NegInf,
        };
        let l = match &logr {
            Some(r) => l.max(ExtRat::Finite(r.clone())),
            None => l,
        };
        match l {
            ExtRat::Finite(q) => acc += q,
            other => return Ok(other),
        }
    }
    Ok(ExtRat::Finite(acc))
}

/// `log_p |P(S)|` for the monic minimal polynomial, via the Gauss norm of
/// `P(c + x)` on the ball of log-radius `r`.
pub fn log_abs_monic_at(poly: &IntPoly, s: &BerkPoint) -> Result<ExtRat> {
    let p = s.prime();
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = poly.degree() as i64;
    let (center, logr) = match s.kind() {
        PointKind::Infinity => {
            return Ok(if d == 0 { ExtRat::Finite(BigRat::zero()) } else { ExtRat::PosInf });
        }
        PointKind::Classical(c) => (c.clone(), None),
        PointKind::Ball { center, logr } => (center.clone(), Some(logr.clone())),
    };
    let shifted = poly.shift_rational(&center);
    // shifted = b^d P(c + x) with b the denominator of c
    let offset = d * int_valuation(center.denom(), p) + int_valuation(&poly.lc(), p);
    let best = match logr {
        None => {
            let c0 = shifted.coeff(0);
            if c0.is_zero() {
                return Ok(ExtRat::NegInf);
            }
            BigRat::from_integer((-int_valuation(&c0, p)).into())
        }
        Some(r) => shifted
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| BigRat::from_integer((-int_valuation(a, p)).into()) + &r * BigRat::from_integer((i as i64).into()))
            .max()
            .expect("nonzero polynomial"),
    };
    Ok(ExtRat::Finite(best + BigRat::from_integer(offset.into())))
}

fn finite_part(x: ExtRat, what: &str) -> Result<BigRat> {
    match x {
        ExtRat::Finite(q) => Ok(q),
        _ => Err(Error::InvalidMeasure(format!("{what} is infinite"))),
    }
}

/// `([F], ρ_v)_v = −|F|⁻¹ Σ_{α∈F} g_ρ(α)`.
pub fn pairing_set_vs_measure(f: &AlgebraicSet, rho: &LocalMeasure, v: Place) -> Result<LocalPairing> {
    check_place(rho.place(), v)?;
    let n = f.len();
    match rho {
        LocalMeasure::Archimedean(m) => {
            let roots = f.roots()?;
            let vals: Vec<f64> = roots.iter().map(|r| m.potential(r.value())).collect();
            if vals.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure("potential is infinite on F".into()));
            }
            Ok(LocalPairing::numeric(-ordered_sum(vals) / n as f64, ARCH_TOL))
        }
        LocalMeasure::Finite(m) => {
            let mut acc = BigRat::zero();
            for (s, w) in m.atoms() {
                acc += w * finite_part(sum_log_sup_roots(f, s)?, "potential on F")?;
            }
            Ok(LocalPairing::exact(m.prime(), -acc / f.size_rat()))
        }
    }
}

/// `∫ log|P|_v dρ_v` for the monic minimal polynomial `P` of `F`.
pub fn integral_log_monic(f: &AlgebraicSet, rho: &LocalMeasure) -> Result<LocalPairing> {
    match rho {
        LocalMeasure::Archimedean(m) => {
            if m.kind() == &crate::complex::PotentialKind::LambdaCircle {
                let lc = BigRat::from_integer(f.min_poly().lc());
                let v = crate::arith::roots::mahler_measure(f.min_poly(), super::set::ROOT_TOL)? - ln_abs_rat(&lc);
                return Ok(LocalPairing::numeric(v, ARCH_TOL));
            }
            let roots = f.roots()?;
            Ok(LocalPairing::numeric(ordered_sum(roots.iter().map(|r| m.potential(r.value()))), ARCH_TOL))
        }
        LocalMeasure::Finite(m) => {
            let mut acc = BigRat::zero();
            for (s, w) in m.atoms() {
                acc += w * finite_part(log_abs_monic_at(f.min_poly(), s)?, "log|P|")?;
            }
            Ok(LocalPairing::exact(m.prime(), acc))
        }
    }
}

/// `(λ_p − [F], λ_p − [F])_p`, exactly.
pub fn good_place_energy(f: &AlgebraicSet, p: u64) -> Result<LogP> {
    let lam = LocalMeasure::lambda(Place::finite(p)?);
    let cross = pairing_set_vs_measure(f, &lam, Place::Finite(p))?;
    let own = pairing_finite_sets(f, f, Place::Finite(p))?;
    let c = -BigRat::from_integer(2.into()) * &cross.as_exact().expect("finite").coeff
        + &own.as_exact().expect("finite").coeff;
    Ok(LogP::new(p, c))
}

/// `Σ_{α∈F} log⁺|α|_p` in `log p` units; equals `v_p(lc)` for primitive `P`.
pub fn sum_log_plus(f: &AlgebraicSet, p: u64) -> BigRat {
    root_valuations_rat(&f.min_poly().rat_coeffs(), p)
        .into_iter()
        .filter_map(|rv| match rv {
            RootValuation::Finite(v) if v.is_negative() => Some(-v),
            _ => None,
        })
        .sum()
}
