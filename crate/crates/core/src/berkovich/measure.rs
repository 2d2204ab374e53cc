use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::point::{BerkPoint, ExtRat, log_sup, project_eps};
use crate::arith::integer::{BigRat, format_rat, rat_to_f64};
use crate::error::{Error, Result};

/// An exact rational multiple of `log p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogP {
    pub prime: u64,
    pub coeff: BigRat,
}

impl LogP {
    pub fn new(prime: u64, coeff: BigRat) -> Self {
        LogP { prime, coeff }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * (self.prime as f64).ln()
    }
}

impl fmt::Display for LogP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*log({})", format_rat(&self.coeff), self.prime)
    }
}

impl Serialize for LogP {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A finitely supported signed measure on the Berkovich line with rational weights.
#[derive(Debug, Clone)]
pub struct AtomicMeasureB {
    prime: u64,
    atoms: Vec<(BerkPoint, BigRat)>,
}

impl PartialEq for AtomicMeasureB {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime
            && self.atoms.len() == other.atoms.len()
            && self.atoms.iter().all(|a| other.atoms.contains(a))
    }
}

impl Eq for AtomicMeasureB {}

impl AtomicMeasureB {
    pub fn zero(prime: u64) -> Self {
        AtomicMeasureB { prime, atoms: Vec::new() }
    }

    /// Atoms at equal points are merged; zero weights are dropped.
    pub fn new(prime: u64, atoms: Vec<(BerkPoint, BigRat)>) -> Result<Self> {
        let mut m = AtomicMeasureB::zero(prime);
        for (s, w) in atoms {
            m.add_atom(s, w)?;
        }
        Ok(m)
    }

    pub fn dirac(point: BerkPoint) -> Self {
        AtomicMeasureB {
            prime: point.prime(),
            atoms: vec![(point, BigRat::from_integer(1.into()))],
        }
    }

    /// `λ_p`, the Dirac mass at the Gauss point.
    pub fn lambda(prime: u64) -> Result<Self> {
        Ok(Self::dirac(BerkPoint::gauss(prime)?))
    }

    /// Uniform probability measure `[F]` on distinct points.
    pub fn uniform(prime: u64, points: &[BerkPoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let w = BigRat::new(1.into(), (points.len() as u64).into());
        Self::new(prime, points.iter().map(|s| (s.clone(), w.clone())).collect())
    }

    pub fn add_atom(&mut self, point: BerkPoint, weight: BigRat) -> Result<()> {
        if point.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, point.prime()));
        }
        if let Some(slot) = self.atoms.iter_mut().find(|(s, _)| *s == point) {
            slot.1 += weight;
        } else {
            self.atoms.push((point, weight));
        }
        self.atoms.retain(|(_, w)| !w.is_zero());
        Ok(())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn atoms(&self) -> &[(BerkPoint, BigRat)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> BigRat {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        self.atoms.iter().all(|(_, w)| !w.is_negative()) && self.total_mass() == BigRat::from_integer(1.into())
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        let mut m = AtomicMeasureB::zero(self.prime);
        if !c.is_zero() {
            m.atoms = self.atoms.iter().map(|(s, w)| (s.clone(), w * c)).collect();
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&BigRat::from_integer((-1).into())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut m = self.clone();
        for (s, w) in &other.atoms {
            m.add_atom(s.clone(), w.clone())?;
        }
        Ok(m)
    }

    /// Push-forward under `π_ε`.
    pub fn project_eps(&self, eps_log: &BigRat) -> Self {
        let mut m = AtomicMeasureB::zero(self.prime);
        for (s, w) in &self.atoms {
            m.add_atom(project_eps(s, eps_log), w.clone()).expect("same prime");
        }
        m
    }

    /// Potential `g_ρ(S) = ∫ log sup{S, ·} dρ`, in `log p` units.
    pub fn potential(&self, s: &BerkPoint) -> Result<ExtRat> {
        let mut acc = BigRat::zero();
        for (t, w) in &self.atoms {
            match log_sup(s, t)? {
                ExtRat::Finite(l) => acc += w * l,
                other => {
                    return Ok(if w.is_positive() == (other == ExtRat::PosInf) {
                        ExtRat::PosInf
                    } else {
                        ExtRat::NegInf
                    });
                }
            }
        }
        Ok(ExtRat::Finite(acc))
    }
}

/// `(ρ, ρ′) = −Σ m_i m′_j log sup{S_i, S′_j}`, skipping ∞ atoms and the
/// classical diagonal.
pub fn energy_atomic_b(rho: &AtomicMeasureB, rho2: &AtomicMeasureB) -> Result<LogP> {
    if rho.prime != rho2.prime {
        return Err(Error::PrimeMismatch(rho.prime, rho2.prime));
    }
    let mut acc = BigRat::zero();
    for (s, w) in &rho.atoms {
        if s.is_infinity() {
            continue;
        }
        for (t, w2) in &rho2.atoms {
            if t.is_infinity() || (s == t && s.is_classical()) {
                continue;
            }
            let l = log_sup(s, t)?;
            let l = l.finite().expect("distinct finite points have finite sup");
            acc -= w * w2 * l;
        }
    }
    Ok(LogP::new(rho.prime, acc))
}

/// Both sides of `([F]_ε, [F]_ε) ≤ ([F], [F]) + |F|⁻¹ log ε⁻¹` for distinct
/// finite points `F`.
pub fn l320_check(points: &[BerkPoint], eps_log: &BigRat) -> Result<(LogP, LogP)> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidMeasure("empty set".into()));
    };
    if points.iter().any(|s| s.is_infinity()) {
        return Err(Error::InvalidPoint("points must lie in the affine line".into()));
    }
    let prime = first.prime();
    let f = AtomicMeasureB::uniform(prime, points)?;
    if f.atoms().len() != points.len() {
        return Err(Error::InvalidMeasure("repeated points".into()));
    }
    let fe = f.project_eps(eps_log);
    let lhs = energy_atomic_b(&fe, &fe)?;
    let base = energy_atomic_b(&f, &f)?;
    let n = BigRat::from_integer((points.len() as u64).into());
    let rhs = LogP::new(prime, base.coeff - eps_log / n);
    Ok((lhs, rhs))
}
