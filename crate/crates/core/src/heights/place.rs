use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::integer::{BigRat, is_prime, ln_abs_rat, padic_valuation_unchecked, prime_support};
use crate::complex::measure::ordered_sum;
use crate::error::{Error, Result};

/// A place of ℚ: the real absolute value or a p-adic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if is_prime(p) { Ok(Place::Finite(p)) } else { Err(Error::NotPrime(p)) }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Archimedean => None,
            Place::Finite(p) => Some(*p),
        }
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Archimedean)
    }

    /// Local degree `N_v`; always 1 over ℚ.
    pub fn degree_factor(&self) -> BigRat {
        BigRat::one()
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => f.write_str("inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "archimedean" => Ok(Place::Archimedean),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::Parse(format!("bad place {t:?}")))?;
                Place::finite(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `‖q‖_v`: `|q|` at the real place, `p^{−v_p(q)}` at `p`.
pub fn norm_at_place(q: &BigRat, v: Place) -> f64 {
    match v {
        Place::Archimedean => crate::arith::integer::rat_to_f64(q).abs(),
        Place::Finite(p) => match padic_valuation_unchecked(q, p).finite() {
            None => 0.0,
            Some(e) => (p as f64).powf(-e as f64),
        },
    }
}

/// `log ‖q‖_v`; zero is rejected.
pub fn log_norm_at_place(q: &BigRat, v: Place) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::ZeroValue);
    }
    Ok(match v {
        Place::Archimedean => ln_abs_rat(q),
        Place::Finite(p) => {
            let e = padic_valuation_unchecked(q, p).finite().expect("nonzero");
            -(e as f64) * (p as f64).ln()
        }
    })
}

/// `Σ_v log ‖q‖_v` over all places; zero up to rounding.
pub fn product_formula_residual(q: &BigRat) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::ZeroValue);
    }
    let mut terms = vec![ln_abs_rat(q)];
    for p in prime_support(q)? {
        terms.push(log_norm_at_place(q, Place::Finite(p))?);
    }
    Ok(ordered_sum(terms))
}
