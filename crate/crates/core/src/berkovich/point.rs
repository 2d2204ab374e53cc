//! Points of the Berkovich line over ℚ_p with rational centers and rational
//! log-radii, and the basic tree operations on them.
//!
//! Radii are stored as `log_p` of the diameter, so every quantity here is an
//! exact rational; multiply by `ln p` at the numeric boundary.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::integer::{BigRat, Valuation, format_rat, int_valuation, is_prime, padic_valuation_unchecked};
use crate::error::{Error, Result};

/// A rational extended by `±∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRat {
    NegInf,
    Finite(BigRat),
    PosInf,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&BigRat> {
        match self {
            ExtRat::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRat::NegInf => f64::NEG_INFINITY,
            ExtRat::PosInf => f64::INFINITY,
            ExtRat::Finite(q) => crate::arith::integer::rat_to_f64(q),
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRat::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl From<BigRat> for ExtRat {
    fn from(q: BigRat) -> Self {
        ExtRat::Finite(q)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => f.write_str("-inf"),
            ExtRat::PosInf => f.write_str("+inf"),
            ExtRat::Finite(q) => f.write_str(&format_rat(q)),
        }
    }
}

/// `−v_p(q)` as an extended rational (`−∞` at 0), i.e. `log_p |q|_p`.
pub(crate) fn log_abs(q: &BigRat, prime: u64) -> ExtRat {
    match padic_valuation_unchecked(q, prime) {
        Valuation::Infinite => ExtRat::NegInf,
        Valuation::Finite(v) => ExtRat::Finite(BigRat::from_integer(BigInt::from(-v))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointKind {
    /// The classical point ∞.
    Infinity,
    /// A classical point of ℚ ⊂ ℙ¹(ℂ_p) (type I).
    Classical(BigRat),
    /// The closed ball `{ |x − center|_p ≤ p^logr }` (type II if `logr ∈ ℤ`, else type III).
    Ball { center: BigRat, logr: BigRat },
}

/// Classification of a point by the usual four types (type IV is never representable).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointType {
    I,
    II,
    III,
}

/// A point of the Berkovich projective line over ℚ_p.
///
/// Ball centers are canonicalized so that structural equality is equality of
/// points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BerkPoint {
    prime: u64,
    kind: PointKind,
}

/// Truncated p-adic expansion of `c` below `p^m`: the canonical center of the
/// ball `{ v_p(x − c) ≥ m }`.
fn canonical_center(c: &BigRat, prime: u64, m: &BigInt) -> BigRat {
    if c.is_zero() {
        return BigRat::zero();
    }
    let v = int_valuation(c.numer(), prime) - int_valuation(c.denom(), prime);
    let v_big = BigInt::from(v);
    if &v_big >= m {
        return BigRat::zero();
    }
    let p = BigInt::from(prime);
    let width: u32 = (m - &v_big).try_into().expect("ball radius out of range");
    let modulus = p.pow(width);
    // c = p^v · u / w with p ∤ u w
    let shifted = if v >= 0 {
        c / BigRat::from_integer(p.pow(v as u32))
    } else {
        c * BigRat::from_integer(p.pow((-v) as u32))
    };
    let u = shifted.numer().mod_floor(&modulus);
    let w = shifted.denom().mod_floor(&modulus);
    let w_inv = mod_inverse(&w, &modulus);
    let t = (u * w_inv).mod_floor(&modulus);
    let scale = if v >= 0 {
        BigRat::from_integer(p.pow(v as u32))
    } else {
        BigRat::new(BigInt::one(), p.pow((-v) as u32))
    };
    BigRat::from_integer(t) * scale
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

impl BerkPoint {
    fn check_prime(prime: u64) -> Result<()> {
        if is_prime(prime) { Ok(()) } else { Err(Error::NotPrime(prime)) }
    }

    pub fn infinity(prime: u64) -> Result<Self> {
        Self::check_prime(prime)?;
        Ok(BerkPoint { prime, kind: PointKind::Infinity })
    }

    pub fn classical(prime: u64, center: BigRat) -> Result<Self> {
        Self::check_prime(prime)?;
        Ok(BerkPoint { prime, kind: PointKind::Classical(center) })
    }

    pub fn ball(prime: u64, center: BigRat, logr: BigRat) -> Result<Self> {
        Self::check_prime(prime)?;
        Ok(Self::ball_unchecked(prime, center, logr))
    }

    pub(crate) fn ball_unchecked(prime: u64, center: BigRat, logr: BigRat) -> Self {
        let m = (-&logr).ceil().to_integer();
        let center = canonical_center(&center, prime, &m);
        BerkPoint { prime, kind: PointKind::Ball { center, logr } }
    }

    /// The Gauss point `S_can`, the unit ball around 0.
    pub fn gauss(prime: u64) -> Result<Self> {
        Self::ball(prime, BigRat::zero(), BigRat::zero())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn kind(&self) -> &PointKind {
        &self.kind
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.kind, PointKind::Infinity)
    }

    /// Classical points of ℙ¹, including ∞.
    pub fn is_classical(&self) -> bool {
        !matches!(self.kind, PointKind::Ball { .. })
    }

    /// Membership in the hyperbolic space `H_p` (types II and III).
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.kind, PointKind::Ball { .. })
    }

    pub fn point_type(&self) -> PointType {
        match &self.kind {
            PointKind::Infinity | PointKind::Classical(_) => PointType::I,
            PointKind::Ball { logr, .. } if logr.is_integer() => PointType::II,
            PointKind::Ball { .. } => PointType::III,
        }
    }

    /// A center for finite points (the ball center, or the classical value).
    pub fn center(&self) -> Option<&BigRat> {
        match &self.kind {
            PointKind::Infinity => None,
            PointKind::Classical(c) => Some(c),
            PointKind::Ball { center, .. } => Some(center),
        }
    }

    /// `log_p diam(S)`: `−∞` for finite classical points, `+∞` for ∞.
    pub fn diam(&self) -> ExtRat {
        match &self.kind {
            PointKind::Infinity => ExtRat::PosInf,
            PointKind::Classical(_) => ExtRat::NegInf,
            PointKind::Ball { logr, .. } => ExtRat::Finite(logr.clone()),
        }
    }

    /// `log_p |S| = log_p sup{S, 0}`.
    pub fn log_abs(&self) -> ExtRat {
        match &self.kind {
            PointKind::Infinity => ExtRat::PosInf,
            PointKind::Classical(c) => log_abs(c, self.prime),
            PointKind::Ball { center, logr } => {
                log_abs(center, self.prime).max(ExtRat::Finite(logr.clone()))
            }
        }
    }

    fn same_prime(&self, other: &BerkPoint) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.prime, other.prime))
        }
    }

    /// Image under `z ↦ a z + b` (`a ≠ 0`).
    pub fn affine_image(&self, a: &BigRat, b: &BigRat) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::ZeroValue);
        }
        Ok(match &self.kind {
            PointKind::Infinity => self.clone(),
            PointKind::Classical(c) => BerkPoint {
                prime: self.prime,
                kind: PointKind::Classical(a * c + b),
            },
            PointKind::Ball { center, logr } => {
                let shift = log_abs(a, self.prime);
                let shift = shift.finite().unwrap().clone();
                Self::ball_unchecked(self.prime, a * center + b, logr + shift)
            }
        })
    }
}

impl fmt::Display for BerkPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PointKind::Infinity => f.write_str("inf"),
            PointKind::Classical(c) => write!(f, "{}", format_rat(c)),
            PointKind::Ball { center, logr } => {
                write!(f, "B({}, {})", format_rat(center), format_rat(logr))
            }
        }
    }
}

/// `log_p sup{S, S′}`, the log-diameter of the smallest ball containing both.
pub fn log_sup(s: &BerkPoint, t: &BerkPoint) -> Result<ExtRat> {
    s.same_prime(t)?;
    use PointKind::*;
    Ok(match (&s.kind, &t.kind) {
        (Infinity, Infinity) => {
            return Err(Error::InvalidPoint("sup{∞, ∞} is undefined".into()));
        }
        (Infinity, _) | (_, Infinity) => ExtRat::PosInf,
        (Classical(a), Classical(b)) => log_abs(&(a - b), s.prime),
        (Classical(a), Ball { center, logr }) | (Ball { center, logr }, Classical(a)) => {
            log_abs(&(a - center), s.prime).max(ExtRat::Finite(logr.clone()))
        }
        (Ball { center: c1, logr: r1 }, Ball { center: c2, logr: r2 }) => log_abs(&(c1 - c2), s.prime)
            .max(ExtRat::Finite(r1.clone()))
            .max(ExtRat::Finite(r2.clone())),
    })
}

/// `S ∧ S′`: the smallest ball containing both points.
pub fn wedge(s: &BerkPoint, t: &BerkPoint) -> Result<BerkPoint> {
    s.same_prime(t)?;
    if s.is_infinity() || t.is_infinity() {
        return Ok(BerkPoint { prime: s.prime, kind: PointKind::Infinity });
    }
    match log_sup(s, t)? {
        ExtRat::NegInf => Ok(s.clone()),
        ExtRat::Finite(r) => Ok(BerkPoint::ball_unchecked(
            s.prime,
            s.center().unwrap().clone(),
            r,
        )),
        ExtRat::PosInf => unreachable!(),
    }
}

/// Ball containment: `S ≤ S′` iff `S ∧ S′ = S′`.
pub fn is_below(s: &BerkPoint, t: &BerkPoint) -> Result<bool> {
    Ok(&wedge(s, t)? == t)
}

/// Hyperbolic distance `2 log sup{S,S′} − log diam S − log diam S′` in `log p` units.
pub fn hyperbolic_distance(s: &BerkPoint, t: &BerkPoint) -> Result<BigRat> {
    let (ds, dt) = match (s.diam(), t.diam()) {
        (ExtRat::Finite(a), ExtRat::Finite(b)) => (a, b),
        _ => {
            return Err(Error::InvalidPoint(
                "hyperbolic distance needs points of H_p".into(),
            ));
        }
    };
    let sup = log_sup(s, t)?;
    let sup = sup.finite().expect("balls have finite sup");
    Ok(BigRat::from_integer(BigInt::from(2)) * sup - ds - dt)
}

/// Median of three points: the lowest of the pairwise wedges.
pub fn median(a: &BerkPoint, b: &BerkPoint, c: &BerkPoint) -> Result<BerkPoint> {
    let cands = [wedge(a, b)?, wedge(a, c)?, wedge(b, c)?];
    Ok(cands
        .into_iter()
        .min_by(|x, y| x.diam().cmp(&y.diam()))
        .unwrap())
}

/// Gromov product `⟨S, S′⟩_{base}` = distance from `base` to the median.
pub fn gromov_product(s: &BerkPoint, t: &BerkPoint, base: &BerkPoint) -> Result<ExtRat> {
    if !base.is_hyperbolic() {
        return Err(Error::InvalidPoint("Gromov base point must lie in H_p".into()));
    }
    s.same_prime(t)?;
    s.same_prime(base)?;
    if s.is_infinity() && t.is_infinity() {
        return Ok(ExtRat::PosInf);
    }
    let m = median(s, t, base)?;
    if m.is_classical() {
        return Ok(ExtRat::PosInf);
    }
    Ok(ExtRat::Finite(hyperbolic_distance(&m, base)?))
}

/// Residual of
/// `⟨S,S′⟩_{S₀} − ⟨S,S₁⟩_{S₀} − ⟨S,S′⟩_{S₁} + ⟨S′,S₀⟩_{S₁}`, which vanishes identically.
pub fn base_change_residual(
    s: &BerkPoint,
    t: &BerkPoint,
    s0: &BerkPoint,
    s1: &BerkPoint,
) -> Result<BigRat> {
    let terms = [
        gromov_product(s, t, s0)?,
        gromov_product(s, s1, s0)?,
        gromov_product(s, t, s1)?,
        gromov_product(t, s0, s1)?,
    ];
    let fin: Vec<&BigRat> = terms
        .iter()
        .map(|x| {
            x.finite()
                .ok_or_else(|| Error::InvalidPoint("infinite Gromov product".into()))
        })
        .collect::<Result<_>>()?;
    Ok(fin[0] - fin[1] - fin[2] + fin[3])
}

/// `π_ε(S)`: the point of `[S, ∞]` of log-diameter `max(log diam S, ε_log)`.
pub fn project_eps(s: &BerkPoint, eps_log: &BigRat) -> BerkPoint {
    match &s.kind {
        PointKind::Infinity => s.clone(),
        PointKind::Classical(c) => BerkPoint::ball_unchecked(s.prime, c.clone(), eps_log.clone()),
        PointKind::Ball { center, logr } => {
            BerkPoint::ball_unchecked(s.prime, center.clone(), logr.max(eps_log).clone())
        }
    }
}

fn pow_p(prime: u64, e: &ExtRat) -> f64 {
    match e {
        ExtRat::NegInf => 0.0,
        ExtRat::PosInf => f64::INFINITY,
        ExtRat::Finite(q) => (crate::arith::integer::rat_to_f64(q) * (prime as f64).ln()).exp(),
    }
}

/// Chordal metric
/// `sup{S,S′}/(max{1,|S|} max{1,|S′|}) − diam S/(2 max{1,|S|}²) − diam S′/(2 max{1,|S′|}²)`,
/// extended continuously to ∞.
pub fn chordal_metric(s: &BerkPoint, t: &BerkPoint) -> Result<f64> {
    s.same_prime(t)?;
    let p = s.prime;
    match (s.is_infinity(), t.is_infinity()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => {
            let u = if s.is_infinity() { t } else { s };
            let m = pow_p(p, &u.log_abs()).max(1.0);
            let diam = pow_p(p, &u.diam());
            // Limit of the formula as the other argument tends to ∞.
            return Ok(1.0 / m - diam / (2.0 * m * m));
        }
        _ => {}
    }
    let sup = pow_p(p, &log_sup(s, t)?);
    let ms = pow_p(p, &s.log_abs()).max(1.0);
    let mt = pow_p(p, &t.log_abs()).max(1.0);
    let ds = pow_p(p, &s.diam());
    let dt = pow_p(p, &t.diam());
    Ok(sup / (ms * mt) - ds / (2.0 * ms * ms) - dt / (2.0 * mt * mt))
}
