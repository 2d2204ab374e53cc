use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::integer::{BigRat, format_rat, is_prime, padic_valuation};
use crate::arith::poly::IntPoly;
use crate::arith::resultant::ordered_root_difference_product;
use crate::berkovich::LogP;
use crate::error::{Error, Result};

/// A finite word over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CodingSequence {
    bits: Vec<u8>,
}

impl CodingSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidPoint(format!("coding {bits:?}")));
        }
        Ok(CodingSequence { bits })
    }

    /// All `2^n` words of length `n`, in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..1u64 << n)
            .map(|m| CodingSequence { bits: (0..n).map(|i| ((m >> (n - 1 - i)) & 1) as u8).collect() })
            .collect()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// First index where the periodic extensions differ; `None` when equal.
    pub fn split_index(&self, other: &CodingSequence) -> Option<usize> {
        let n = self.len().max(other.len());
        let period = self.len() * other.len();
        (0..period.max(n)).find(|&i| self.bits[i % self.len()] != other.bits[i % other.len()])
    }
}

/// Both computations of `([F_n], [F_n])_p` for `P(T) = T² + 1/p`, with the closed form `−n/2^{2n} log √|C|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasilicaReport {
    pub prime: u64,
    pub n: usize,
    /// `−(log r) 4^{−n} Σ_{ε≠ε′} (1 − k(ε,ε′))`, `r = p^{1/2}`.
    pub oracle: LogP,
    /// `−4^{−n} log |∏_{z≠z′} (z − z′)|_p` from the exact discriminant.
    pub discriminant: LogP,
    /// `−(n / 2^{2n}) log √p`.
    pub closed_form: LogP,
    pub agree: bool,
    pub negative: bool,
    /// `oracle / closed_form`.
    #[serde(serialize_with = "ser_rat")]
    pub ratio_to_closed_form: BigRat,
}

fn ser_rat<S: serde::Serializer>(q: &BigRat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(q))
}

fn four_pow(n: usize) -> BigRat {
    BigRat::from_integer(BigInt::from(4).pow(n as u32))
}

/// Coefficient of `log p` from the coding enumeration.
pub fn basilica_oracle(n: usize) -> BigRat {
    let words = CodingSequence::all(n);
    let mut sum = BigInt::zero();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j {
                let k = a.split_index(b).expect("distinct words") as i64;
                sum += 1 - k;
            }
        }
    }
    // log r = ½ log p
    -BigRat::new(sum, BigInt::from(2)) / four_pow(n)
}

/// `p^{n'}·(P^n(T) − T)` as a primitive integer polynomial, `P(T) = T² + 1/p`.
pub fn basilica_periodic_poly(p: u64, n: usize) -> IntPoly {
    // P^k(T) = A_k(T) / p^{e_k}; A_{k+1} = A_k² + p^{2e_k − 1}, e_{k+1} = 2e_k (e_1 = 1)
    let pb = BigInt::from(p);
    let mut a = IntPoly::new(vec![BigInt::from(1), BigInt::zero(), pb.clone()]);
    let mut e: u32 = 1;
    for _ in 1..n {
        a = &a.pow(2) + &IntPoly::constant(pb.pow(2 * e - 1));
        e *= 2;
    }
    let phi = &a - &IntPoly::x().scale(&pb.pow(e));
    phi.primitive_part()
}

/// Coefficient of `log p` from the discriminant valuation.
pub fn basilica_discriminant(p: u64, n: usize) -> Result<BigRat> {
    let prod = ordered_root_difference_product(&basilica_periodic_poly(p, n))?;
    let v = padic_valuation(&prod, p)?
        .finite()
        .ok_or(Error::NotSquarefree)?;
    // −log|x|_p = v_p(x) log p
    Ok(BigRat::from_integer(v.into()) / four_pow(n))
}

/// Closed form `−(n/2^{2n}) log √p` as a coefficient of `log p`.
pub fn basilica_closed_form(n: usize) -> BigRat {
    -BigRat::new(BigInt::from(n), BigInt::from(2)) / four_pow(n)
}

pub fn basilica_local_energy(p: u64, n: usize) -> Result<BasilicaReport> {
    if p == 2 {
        return Err(Error::Inadmissible("the example needs an odd prime".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || n > 5 {
        return Err(Error::BudgetExceeded(format!("n = {n} outside 1..=5")));
    }
    let oracle = basilica_oracle(n);
    let disc = basilica_discriminant(p, n)?;
    let closed_form = basilica_closed_form(n);
    Ok(BasilicaReport {
        prime: p,
        n,
        agree: oracle == disc,
        negative: oracle.is_negative() && disc.is_negative(),
        ratio_to_closed_form: &oracle / &closed_form,
        oracle: LogP::new(p, oracle),
        discriminant: LogP::new(p, disc),
        closed_form: LogP::new(p, closed_form),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};

    #[test]
    fn codings() {
        let w = CodingSequence::all(3);
        assert_eq!(w.len(), 8);
        assert_eq!(w[5].bits(), &[1, 0, 1]);
        assert_eq!(w[0].split_index(&w[1]), Some(2));
        assert_eq!(w[0].split_index(&w[0]), None);
        assert!(CodingSequence::new(vec![]).is_err());
    }

    #[test]
    fn small_cases() {
        assert_eq!(basilica_oracle(1), rat(-1, 4));
        assert_eq!(basilica_oracle(2), rat(-1, 4));
        assert_eq!(basilica_discriminant(3, 1).unwrap(), rat(-1, 4));
        let r = basilica_local_energy(3, 2).unwrap();
        assert!(r.agree && r.negative);
        assert_eq!(r.ratio_to_closed_form, rat_int(4));
        assert!(basilica_local_energy(2, 1).is_err());
    }

    #[test]
    fn routes_agree() {
        for p in [3, 5, 7] {
            for n in 1..=4 {
                let r = basilica_local_energy(p, n).unwrap();
                assert!(r.agree, "p = {p}, n = {n}: {} vs {}", r.oracle, r.discriminant);
                assert!(r.negative);
                assert_eq!(r.ratio_to_closed_form, BigRat::from_integer(BigInt::from(1u32 << n)));
            }
        }
    }
}
