//! Rationals, p-adic valuations, primality and integer factorization.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; `num_rational` keeps it reduced with a positive denominator.
pub type BigRat = BigRational;

/// A p-adic valuation, `+∞` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRat::new(parse_int(n)?, d))
        }
        None => Ok(BigRat::from_integer(parse_int(s)?)),
    }
}

pub fn format_rat(q: &BigRat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Natural logarithm of a big integer's absolute value without overflow.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

pub fn ln_abs_rat(q: &BigRat) -> f64 {
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

/// `q` as f64, robust for huge numerators and denominators.
pub fn rat_to_f64(q: &BigRat) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if q.numer().bits() < 1000 && q.denom().bits() < 1000 {
        return q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap();
    }
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs_rat(q).exp()
}

/// Multiplicity of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p_big = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    // Strip large powers first so huge integers with high valuation stay cheap.
    let mut chunk = vec![(p_big.clone(), 1i64)];
    while chunk.last().unwrap().0.bits() * 2 <= m.bits() {
        let (q, e) = chunk.last().unwrap().clone();
        chunk.push((&q * &q, 2 * e));
    }
    for (q, e) in chunk.iter().rev() {
        loop {
            let (d, r) = m.div_rem(q);
            if !r.is_zero() {
                break;
            }
            m = d;
            v += e;
        }
    }
    v
}

/// `v_p(q)`, with `+∞` for zero.
pub fn padic_valuation(q: &BigRat, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(padic_valuation_unchecked(q, p))
}

pub(crate) fn padic_valuation_unchecked(q: &BigRat, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    if limit >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| small_primes(TRIAL_LIMIT))
}

fn pollard_brent_u64(n: u64, seed: u64) -> Option<u64> {
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in (seed..).take(20) {
        let c = c % n;
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
            if r > 1 << 26 {
                break;
            }
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}

fn pollard_brent_big(n: &BigUint, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u64..6 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = one.clone();
        let m = 64u64;
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                    steps += 1;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
            if steps > budget {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g > one && &g < n {
            return Some(g);
        }
    }
    None
}

fn split_composite(n: BigUint, budget: u64, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return Ok(());
    }
    let factor = match n.to_u64() {
        Some(small) => pollard_brent_u64(small, 1).map(BigUint::from),
        None => pollard_brent_big(&n, budget),
    };
    match factor {
        Some(d) => {
            let e = &n / &d;
            split_composite(d, budget, out)?;
            split_composite(e, budget, out)
        }
        None => Err(Error::BudgetExceeded(format!(
            "could not split {}-bit composite",
            n.bits()
        ))),
    }
}

/// Prime factorization of `|n|` (n ≠ 0): trial division up to 10⁶, then
/// Miller–Rabin and Pollard–Brent with an iteration budget for large cofactors.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroValue);
    }
    let mut m = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();
    for &p in trial_primes() {
        if let Some(mut small) = m.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
            while small % p == 0 {
                small /= p;
                found.push(BigUint::from(p));
            }
            m = BigUint::from(small);
            continue;
        }
        let pb = BigUint::from(p);
        while (&m % &pb).is_zero() {
            m /= &pb;
            found.push(pb.clone());
        }
    }
    if !m.is_one() {
        split_composite(m, 5_000_000, &mut found)?;
    }
    found.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for f in found {
        match out.last_mut() {
            Some((q, e)) if *q == f => *e += 1,
            _ => out.push((f, 1)),
        }
    }
    Ok(out)
}

/// Distinct primes dividing numerator or denominator of `q`, as u64.
pub fn prime_support(q: &BigRat) -> Result<Vec<u64>> {
    let mut primes = Vec::new();
    for part in [q.numer(), q.denom()] {
        if part.is_zero() {
            return Err(Error::ZeroValue);
        }
        for (p, _) in factor_integer(part)? {
            let p = p
                .to_u64()
                .ok_or_else(|| Error::Unsupported("prime factor exceeds 64 bits".into()))?;
            primes.push(p);
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// Sign of a big integer as -1, 0, 1.
pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
