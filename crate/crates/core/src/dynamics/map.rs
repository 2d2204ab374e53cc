use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::integer::{BigRat, parse_rat};
use crate::arith::poly::IntPoly;
use crate::arith::resultant::resultant;
use crate::error::{Error, Result};

/// A point of `ℙ¹(ℚ)` as a coprime integer pair `[x0 : x1]`, normalized so
/// that `x1 > 0`, or `[1 : 0]` for `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x0: BigInt,
    x1: BigInt,
}

impl ProjPoint {
    pub fn new(x0: BigInt, x1: BigInt) -> Result<Self> {
        if x0.is_zero() && x1.is_zero() {
            return Err(Error::InvalidPoint("[0 : 0]".into()));
        }
        let g = x0.gcd(&x1);
        let (mut a, mut b) = (x0 / &g, x1 / &g);
        if b.is_negative() || (b.is_zero() && a.is_negative()) {
            a = -a;
            b = -b;
        }
        Ok(ProjPoint { x0: a, x1: b })
    }

    pub fn from_rat(q: &BigRat) -> Self {
        ProjPoint { x0: q.numer().clone(), x1: q.denom().clone() }
    }

    pub fn infinity() -> Self {
        ProjPoint { x0: BigInt::one(), x1: BigInt::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.x1.is_zero()
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.x0, &self.x1)
    }

    pub fn to_rat(&self) -> Option<BigRat> {
        (!self.is_infinity()).then(|| BigRat::new(self.x0.clone(), self.x1.clone()))
    }

    /// `"a/b"`, an integer, or `"inf"`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" => Ok(Self::infinity()),
            t => Ok(Self::from_rat(&parse_rat(t)?)),
        }
    }

    /// `log max(|x0|, |x1|)`, the naive height of the point.
    pub fn naive_height(&self) -> f64 {
        let m = if self.x0.abs() > self.x1.abs() { self.x0.abs() } else { self.x1.abs() };
        crate::arith::integer::ln_abs_bigint(&m)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rat() {
            None => f.write_str("inf"),
            Some(q) => f.write_str(&crate::arith::integer::format_rat(&q)),
        }
    }
}

/// A rational map `R = num/den` over ℚ with its homogeneous integer lift
/// `[P₀ : P₁]`, `P₀(x0,x1) = x1^D num(x0/x1)`, of joint content 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMapQ {
    num: IntPoly,
    den: IntPoly,
    degree: usize,
}

impl RationalMapQ {
    pub fn new(num: &IntPoly, den: &IntPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if num.is_zero() {
            return Err(Error::DegreeTooSmall(0));
        }
        if num.gcd(den).degree() > 0 {
            return Err(Error::Inadmissible("numerator and denominator share a factor".into()));
        }
        let degree = num.degree().max(den.degree());
        if degree == 0 {
            return Err(Error::DegreeTooSmall(0));
        }
        let c = num.content().gcd(&den.content());
        let (mut n, mut d) = (num.div_scalar(&c), den.div_scalar(&c));
        if d.lc().is_negative() {
            n = -&n;
            d = -&d;
        }
        Ok(RationalMapQ { num: n, den: d, degree })
    }

    pub fn polynomial(coeffs: &IntPoly) -> Result<Self> {
        Self::new(coeffs, &IntPoly::one())
    }

    /// `"num_coeffs|den_coeffs"` in ascending order; `"0,0,1|1"` is `z²`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split('|');
        let num = IntPoly::parse(parts.next().unwrap_or(""))?;
        let den = match parts.next() {
            Some(t) => IntPoly::parse(t)?,
            None => IntPoly::one(),
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("map {s:?} has more than one '|'")));
        }
        Self::new(&num, &den)
    }

    /// `z^D + c` for rational `c`.
    pub fn unicritical(d: usize, c: &BigRat) -> Result<Self> {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[0] = c.numer().clone();
        coeffs[d] = c.denom().clone();
        Self::new(&IntPoly::new(coeffs), &IntPoly::constant(c.denom().clone()))
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Leading coefficient `a` of `R(z) = a z^D + …` for polynomial maps.
    pub fn polynomial_lc(&self) -> Option<BigRat> {
        self.is_polynomial().then(|| BigRat::new(self.num.lc(), self.den.lc()))
    }

    pub fn spec_string(&self) -> String {
        format!("{}|{}", self.num.to_coeff_string(), self.den.to_coeff_string())
    }

    pub fn lift_at(&self, x0: &BigInt, x1: &BigInt) -> (BigInt, BigInt) {
        (self.num.eval_homogeneous(x0, x1, self.degree), self.den.eval_homogeneous(x0, x1, self.degree))
    }

    pub fn apply(&self, x: &ProjPoint) -> ProjPoint {
        let (a, b) = self.lift_at(&x.x0, &x.x1);
        ProjPoint::new(a, b).expect("resultant is nonzero")
    }

    pub fn apply_rat(&self, q: &BigRat) -> Option<BigRat> {
        self.apply(&ProjPoint::from_rat(q)).to_rat()
    }

    /// `Res(P₀, P₁)` of the homogeneous lift, up to sign.
    pub fn homogeneous_resultant(&self) -> Result<BigInt> {
        let (dn, dd) = (self.num.degree(), self.den.degree());
        let r = resultant(&self.num, &self.den)?;
        let extra = if dn >= dd {
            self.num.lc().pow((self.degree - dd) as u32)
        } else {
            self.den.lc().pow((self.degree - dn) as u32)
        };
        Ok((r * extra).abs())
    }

    /// `R∘R∘…∘R` (`n` times) as a rational map of degree `D^n`.
    pub fn iterate(&self, n: usize) -> Result<Self> {
        let (num, den) = self.iterate_lift(n);
        Self::new(&num, &den)
    }

    /// Dehomogenized lift of `R^n`: `(P₀^{(n)}(z,1), P₁^{(n)}(z,1))`, no reduction.
    pub(crate) fn iterate_lift(&self, n: usize) -> (IntPoly, IntPoly) {
        let (mut a, mut b) = (IntPoly::x(), IntPoly::one());
        let d = self.degree;
        for _ in 0..n {
            // P_i(a, b) = Σ c_j a^j b^{D−j}
            let compose = |p: &IntPoly| {
                let mut acc = IntPoly::zero();
                let mut bp = vec![IntPoly::one()];
                for k in 1..=d {
                    bp.push(&bp[k - 1] * &b);
                }
                let mut ap = IntPoly::one();
                for j in 0..=d {
                    let c = p.coeff(j);
                    if !c.is_zero() {
                        acc = &acc + &(&ap * &bp[d - j]).scale(&c);
                    }
                    ap = &ap * &a;
                }
                acc
            };
            let (na, nb) = (compose(&self.num), compose(&self.den));
            a = na;
            b = nb;
        }
        (a, b)
    }

    /// `R(z)` in floating point; `None` at poles.
    pub fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        let v = horner_f64(&self.num, z) / horner_f64(&self.den, z);
        v.is_finite().then_some(v)
    }
}

pub(crate) fn horner_f64(p: &IntPoly, z: Complex64) -> Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
}

impl fmt::Display for RationalMapQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};

    #[test]
    fn parse_and_normalize() {
        let r = RationalMapQ::parse("0,0,1|1").unwrap();
        assert_eq!(r.degree(), 2);
        assert!(r.is_polynomial());
        let r = RationalMapQ::parse("2,0,2|0,-4").unwrap();
        assert_eq!(r.num(), &IntPoly::from_i64(&[-1, 0, -1]));
        assert_eq!(r.den(), &IntPoly::from_i64(&[0, 2]));
        assert!(RationalMapQ::parse("0,1,1|0,1").is_err());
        assert!(RationalMapQ::parse("3|1").is_err());
    }

    #[test]
    fn apply_points() {
        let r = RationalMapQ::parse("1,0,1|0,1").unwrap(); // (z²+1)/z
        assert_eq!(r.apply_rat(&rat_int(2)), Some(rat(5, 2)));
        assert_eq!(r.apply_rat(&rat_int(0)), None);
        assert!(r.apply(&ProjPoint::infinity()).is_infinity());
        let half = RationalMapQ::unicritical(2, &rat(1, 2)).unwrap();
        assert_eq!(half.apply_rat(&rat_int(1)), Some(rat(3, 2)));
        let z = half.eval_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!((z.re - 1.5).abs() < 1e-15);
    }

    #[test]
    fn iterates() {
        let r = RationalMapQ::parse("-1,0,1").unwrap();
        let r2 = r.iterate(2).unwrap();
        assert_eq!(r2.num(), &IntPoly::from_i64(&[0, 0, -2, 0, 1]));
        let x = rat(3, 7);
        assert_eq!(r2.apply_rat(&x), r.apply_rat(&r.apply_rat(&x).unwrap()));
        let m = RationalMapQ::parse("1,0,1|0,1").unwrap();
        let m2 = m.iterate(2).unwrap();
        assert_eq!(m2.degree(), 4);
        assert_eq!(m2.apply_rat(&x), m.apply_rat(&m.apply_rat(&x).unwrap()));
    }

    #[test]
    fn resultants() {
        assert_eq!(RationalMapQ::parse("1,0,1").unwrap().homogeneous_resultant().unwrap(), BigInt::one());
        let r = RationalMapQ::unicritical(2, &rat(1, 2)).unwrap();
        assert_eq!(r.homogeneous_resultant().unwrap(), BigInt::from(16));
    }
}
