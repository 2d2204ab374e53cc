//! Dense univariate polynomials with big-integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::integer::{BigRat, rat_to_f64};
use crate::error::{Error, Result};

/// Integer polynomial, coefficients in ascending degree order.
///
/// The coefficient vector never has trailing zeros; the zero polynomial is
/// the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `b·x − a`, vanishing at `a/b`.
    pub fn linear_root(q: &BigRat) -> Self {
        Self::new(vec![-q.numer().clone(), q.denom().clone()])
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Order of vanishing at 0.
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        self.div_scalar(&g)
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_zero() && self.content().is_one()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|a| {
                    debug_assert!((a % c).is_zero());
                    a / c
                })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `x^k · self`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rat(&self, x: &BigRat) -> BigRat {
        // Homogeneous Horner: Σ a_i n^i d^{deg-i} / d^deg keeps everything integral.
        if self.is_zero() {
            return BigRat::zero();
        }
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        BigRat::new(acc, dpow / d)
    }

    /// Homogenized value `Σ a_i x0^i x1^{d-i}` for a target degree `d ≥ deg`.
    pub fn eval_homogeneous(&self, x0: &BigInt, x1: &BigInt, d: usize) -> BigInt {
        let mut acc = BigInt::zero();
        let mut x1_pow = BigInt::one();
        let deg = self.degree();
        for c in self.coeffs.iter().rev() {
            acc = acc * x0 + c * &x1_pow;
            x1_pow *= x1;
        }
        if self.is_zero() {
            return acc;
        }
        acc * x1.pow((d - deg) as u32)
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &IntPoly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(c.clone());
        }
        acc
    }

    /// `b^deg · P(y + a/b)`: an integer polynomial whose roots are `α − a/b`.
    pub fn shift_rational(&self, c: &BigRat) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let d = self.degree();
        let lin = IntPoly::new(vec![c.numer().clone(), c.denom().clone()]);
        let mut acc = Self::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            let term = lin.pow(i as u32).scale(&(a * c.denom().pow((d - i) as u32)));
            acc = &acc + &term;
        }
        acc
    }

    /// Reversal `x^deg P(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Pseudo-remainder: `lc(d)^{deg a - deg d + 1}·a = q·d + r`.
    pub fn pseudo_rem(&self, divisor: &IntPoly) -> Self {
        assert!(!divisor.is_zero());
        if self.degree() < divisor.degree() || self.is_zero() {
            return self.clone();
        }
        let db = divisor.degree();
        let lb = divisor.lc();
        let mut r = self.coeffs.clone();
        let mut e = self.degree() - db + 1;
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let lead = r[top].clone();
            let shift = top - db;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (i, b) in divisor.coeffs.iter().enumerate() {
                r[i + shift] -= &lead * b;
            }
            debug_assert!(r[top].is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            e -= 1;
        }
        let factor = lb.pow(e as u32);
        Self::new(r.into_iter().map(|c| c * &factor).collect())
    }

    /// Exact quotient `self / divisor`; panics (debug) if the division is inexact over ℤ.
    pub fn div_exact(&self, divisor: &IntPoly) -> Self {
        assert!(!divisor.is_zero());
        if self.is_zero() {
            return self.clone();
        }
        let db = divisor.degree();
        let lb = divisor.lc();
        let mut r = self.coeffs.clone();
        let n = self.degree();
        if n < db {
            return Self::zero();
        }
        let mut q = vec![BigInt::zero(); n - db + 1];
        for k in (0..=n - db).rev() {
            let top = k + db;
            let (qc, rem) = r[top].div_rem(&lb);
            debug_assert!(rem.is_zero(), "inexact polynomial division");
            if !qc.is_zero() {
                for (i, b) in divisor.coeffs.iter().enumerate() {
                    r[i + k] -= &qc * b;
                }
            }
            q[k] = qc;
        }
        debug_assert!(r.iter().all(|c| c.is_zero()), "nonzero remainder");
        Self::new(q)
    }

    /// Primitive gcd by the subresultant remainder sequence.
    pub fn gcd(&self, other: &IntPoly) -> Self {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        if b.is_zero() {
            return a.primitive_part();
        }
        if a.is_zero() {
            return b.primitive_part();
        }
        a = a.primitive_part();
        b = b.primitive_part();
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = a.degree() - b.degree();
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return b.primitive_part();
            }
            if r.degree() == 0 {
                return IntPoly::one();
            }
            a = b;
            let divisor = &g * h.pow(delta as u32);
            b = r.div_scalar(&divisor);
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta as u32) / h.pow(delta as u32 - 1)
            };
        }
    }

    /// Whether `P mod q` and `P' mod q` are coprime with the degree preserved,
    /// which certifies that `P` is squarefree over ℚ.
    pub fn squarefree_mod_prime(&self, q: u64) -> bool {
        let reduce = |p: &IntPoly| -> Vec<u64> {
            let qb = BigInt::from(q);
            let mut v: Vec<u64> = p
                .coeffs
                .iter()
                .map(|c| c.mod_floor(&qb).to_u64().unwrap())
                .collect();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        let f = reduce(self);
        if f.len() != self.coeffs.len() || f.len() < 2 {
            return false;
        }
        let g = reduce(&self.derivative());
        if g.is_empty() {
            return false;
        }
        modp::gcd_degree(f, g, q) == 0
    }

    /// Squarefree part (primitive). Uses a modular certificate first and
    /// falls back to the exact gcd.
    pub fn squarefree_part(&self) -> Self {
        if self.degree() <= 1 {
            return self.primitive_part();
        }
        for q in modp::CERT_PRIMES {
            if self.squarefree_mod_prime(q) {
                return self.primitive_part();
            }
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.primitive_part()
        } else {
            self.div_exact(&g).primitive_part()
        }
    }

    /// Coefficients as f64 scaled by a common power of two so the largest is O(1).
    pub fn scaled_f64_coeffs(&self) -> Vec<f64> {
        let max_bits = self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0);
        let shift = max_bits.saturating_sub(60);
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    return 0.0;
                }
                let bits = c.bits();
                if bits <= 1000 && shift == 0 {
                    return c.to_f64().unwrap();
                }
                let drop = bits.saturating_sub(63);
                let top: BigInt = c >> drop;
                let exp = drop as i64 - shift as i64;
                top.to_f64().unwrap() * 2f64.powi(exp.clamp(-1100, 1100) as i32)
            })
            .collect()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let c = self.scaled_f64_coeffs();
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Parses the ascending comma-separated coefficient format, e.g. `"-1,-1,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    /// Inverse of [`IntPoly::parse`].
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Coefficients as exact rationals.
    pub fn rat_coeffs(&self) -> Vec<BigRat> {
        self.coeffs
            .iter()
            .map(|c| BigRat::from_integer(c.clone()))
            .collect()
    }

    /// Mean of the roots, `−a_{d−1}/(d·a_d)`.
    pub fn root_mean(&self) -> Result<BigRat> {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return Err(Error::DegreeTooSmall(d));
        }
        Ok(BigRat::new(
            -self.coeff(d - 1),
            self.lc() * BigInt::from(d),
        ))
    }

    pub fn eval_rat_f64(&self, x: &BigRat) -> f64 {
        rat_to_f64(&self.eval_rat(x))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly[{}]", self.to_coeff_string())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_coeff_string())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i);
                    let b = rhs.coeffs.get(i);
                    match (a, b) {
                        (Some(a), Some(b)) => a + b,
                        (Some(a), None) => a.clone(),
                        (None, Some(b)) => b.clone(),
                        (None, None) => BigInt::zero(),
                    }
                })
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// Small modular polynomial helpers used for squarefree certificates.
mod modp {
    pub(super) const CERT_PRIMES: [u64; 3] = [
        2_305_843_009_213_693_951,
        1_000_000_000_000_000_003,
        4_611_686_018_427_387_847,
    ];

    fn mul(a: u64, b: u64, q: u64) -> u64 {
        ((a as u128 * b as u128) % q as u128) as u64
    }

    fn inv(a: u64, q: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % q;
        let mut e = q - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b, q);
            }
            b = mul(b, b, q);
            e >>= 1;
        }
        r
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn rem(mut a: Vec<u64>, b: &[u64], q: u64) -> Vec<u64> {
        let db = b.len() - 1;
        let inv_lb = inv(b[db], q);
        while a.len() > db {
            let top = a.len() - 1;
            let factor = mul(a[top], inv_lb, q);
            if factor != 0 {
                let shift = top - db;
                for (i, &bc) in b.iter().enumerate() {
                    let sub = mul(factor, bc, q);
                    a[i + shift] = (a[i + shift] + q - sub) % q;
                }
            }
            a.pop();
            trim(&mut a);
        }
        a
    }

    /// Degree of gcd(a, b) over 𝔽_q.
    pub(super) fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> usize {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(a, &b, q);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn arithmetic_and_trim() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), 1);
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
        assert!((&p(&[1, 1]) - &p(&[1, 1])).is_zero());
        assert_eq!(p(&[0, 0, 1]).compose(&p(&[1, 1])), p(&[1, 2, 1]));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let sq = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[1, 0, 1]);
        assert_eq!(sq.squarefree_part(), &p(&[-1, 1]) * &p(&[1, 0, 1]));
        assert!(p(&[-1, -1, 1]).squarefree_mod_prime(modp::CERT_PRIMES[0]));
    }

    #[test]
    fn pseudo_remainder_identity() {
        let a = p(&[3, 0, 5, 2]);
        let b = p(&[1, 3]);
        let r = a.pseudo_rem(&b);
        assert_eq!(r.degree(), 0);
        // lc(b)^{3} a(−1/3) = r
        let val = a.eval_rat(&rat(-1, 3)) * BigRat::from_integer(BigInt::from(27));
        assert_eq!(val, BigRat::from_integer(r.coeff(0)));
    }

    #[test]
    fn shift_by_rational() {
        // x² − 2 shifted by 1/2: 4((y+1/2)² − 2) = 4y² + 4y − 7
        assert_eq!(p(&[-2, 0, 1]).shift_rational(&rat(1, 2)), p(&[-7, 4, 4]));
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let q = IntPoly::parse("-1, -1, 1").unwrap();
        assert_eq!(q, p(&[-1, -1, 1]));
        assert_eq!(q.to_coeff_string(), "-1,-1,1");
        assert!(IntPoly::parse("1,x").is_err());
    }

    #[test]
    fn homogeneous_evaluation() {
        // x² + 1 as a degree-3 form at (2, 3): (4 + 9)·3 = 39
        let v = p(&[1, 0, 1]).eval_homogeneous(&BigInt::from(2), &BigInt::from(3), 3);
        assert_eq!(v, BigInt::from(39));
    }
}
