//! Resultants and discriminants via the subresultant remainder sequence.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::integer::BigRat;
use super::poly::IntPoly;
use crate::error::{Error, Result};

/// `Res(P, Q) = lc(P)^{deg Q} lc(Q)^{deg P} ∏ (α_i − β_j)`.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(subresultant(p, q))
}

fn subresultant(p: &IntPoly, q: &IntPoly) -> BigInt {
    let (dp, dq) = (p.degree(), q.degree());
    if dq == 0 {
        return q.lc().pow(dp as u32);
    }
    if dp == 0 {
        return p.lc().pow(dq as u32);
    }
    let mut sign_neg = false;
    let (mut a, mut b) = (p.clone(), q.clone());
    if dp < dq {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            sign_neg = true;
        }
    }
    let ca = a.content();
    let cb = b.content();
    let t = ca.pow(b.degree() as u32) * cb.pow(a.degree() as u32);
    a = a.div_scalar(&ca);
    b = b.div_scalar(&cb);
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.degree(), b.degree());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign_neg = !sign_neg;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return BigInt::zero();
        }
        a = b;
        b = r.div_scalar(&(&g * h.pow(delta as u32)));
        g = a.lc();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta as u32) / h.pow(delta as u32 - 1)
        };
        if b.degree() == 0 {
            let da = a.degree() as u32;
            let hh = b.lc().pow(da) / h.pow(da - 1);
            let res = t * hh;
            return if sign_neg { -res } else { res };
        }
    }
}

/// `(−1)^{d(d−1)/2} Res(P, P′) / lc(P)`.
///
/// With this convention `disc(P) = lc(P)^{2d−2} ∏_{i<j} (α_i − α_j)²`, so the
/// ordered product `∏_{i≠j} (α_i − α_j)` equals `(−1)^{d(d−1)/2} disc(P) / lc(P)^{2d−2}`.
pub fn discriminant(p: &IntPoly) -> Result<BigRat> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = p.degree();
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    let res = resultant(p, &p.derivative())?;
    if res.is_zero() {
        return Err(Error::NotSquarefree);
    }
    let sign = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
    Ok(BigRat::new(res * BigInt::from(sign), p.lc()))
}

/// `∏_{α ≠ α'} (α − α')` over ordered pairs of roots, i.e. `Δ_F` for the root set.
/// Returns 1 for degree 1 (empty product).
pub fn ordered_root_difference_product(p: &IntPoly) -> Result<BigRat> {
    let d = p.degree();
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if d < 2 {
        return Ok(BigRat::one());
    }
    let disc = discriminant(p)?;
    let sign = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
    let lc_pow = BigRat::from_integer(p.lc().pow((2 * d - 2) as u32));
    Ok(disc * BigRat::from_integer(BigInt::from(sign)) / lc_pow)
}

/// `∏_{α ∈ roots(P), β ∈ roots(Q)} (α − β) = Res(P,Q) / (lc(P)^{deg Q} lc(Q)^{deg P})`.
pub fn cross_root_difference_product(p: &IntPoly, q: &IntPoly) -> Result<BigRat> {
    let res = resultant(p, q)?;
    let denom = p.lc().pow(q.degree() as u32) * q.lc().pow(p.degree() as u32);
    Ok(BigRat::new(res, denom))
}

/// Sign-insensitive helper: `|Res|` is what valuations need.
pub fn abs_resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    resultant(p, q).map(|r| r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    /// Sylvester determinant by fraction-free Bareiss elimination.
    fn sylvester_oracle(a: &IntPoly, b: &IntPoly) -> BigInt {
        let (m, n) = (a.degree(), b.degree());
        let size = m + n;
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for row in 0..n {
            for (k, c) in a.coeffs().iter().rev().enumerate() {
                mat[row][row + k] = c.clone();
            }
        }
        for row in 0..m {
            for (k, c) in b.coeffs().iter().rev().enumerate() {
                mat[n + row][row + k] = c.clone();
            }
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..size {
            if mat[k][k].is_zero() {
                let Some(swap) = (k + 1..size).find(|&r| !mat[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                mat.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                    mat[i][j] = v / &prev;
                }
                mat[i][k] = BigInt::zero();
            }
            prev = mat[k][k].clone();
        }
        sign * &mat[size - 1][size - 1]
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p(&[-2, 0, 1]), &p(&[-3, 0, 1])).unwrap(), BigInt::from(1));
        assert_eq!(resultant(&p(&[1, 0, 1]), &p(&[1, 0, 1])).unwrap(), BigInt::zero());
        // Res(x − a, Q) = Q(a)
        let q = p(&[5, -3, 0, 2]);
        assert_eq!(resultant(&p(&[-4, 1]), &q).unwrap(), q.eval_int(&BigInt::from(4)));
        assert_eq!(resultant(&IntPoly::zero(), &q), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn resultant_matches_sylvester() {
        let cases = [
            (vec![3, -1, 4, 1, -5], vec![9, 2, -6]),
            (vec![1, 1, 1, 1, 1, 1], vec![-2, 0, 3, 7]),
            (vec![2, 0, 0, 6], vec![1, 4, 0, 0, 5, 2]),
            (vec![7, 3], vec![2, 5, 2, 1]),
            (vec![0, 0, 1], vec![0, 1, 1]),
        ];
        for (a, b) in cases {
            let (a, b) = (p(&a), p(&b));
            assert_eq!(resultant(&a, &b).unwrap(), sylvester_oracle(&a, &b), "{a:?} {b:?}");
            assert_eq!(resultant(&b, &a).unwrap(), sylvester_oracle(&b, &a));
        }
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p(&[1, 0, 1])).unwrap(), rat_int(-4));
        assert_eq!(discriminant(&p(&[-1, -1, 1])).unwrap(), rat_int(5));
        assert_eq!(discriminant(&p(&[0, -1, 0, 1])).unwrap(), rat_int(4));
        assert_eq!(discriminant(&p(&[1, -2, 1])), Err(Error::NotSquarefree));
        // non-monic: disc(2x² + 3x − 1) = 9 + 8 = 17
        assert_eq!(discriminant(&p(&[-1, 3, 2])).unwrap(), rat_int(17));
    }

    #[test]
    fn ordered_products() {
        // roots ±i: (i − (−i))·(−i − i) = 4
        assert_eq!(ordered_root_difference_product(&p(&[1, 0, 1])).unwrap(), rat_int(4));
        // roots 1/2 and −1 of 2x² + x − 1: (3/2)(−3/2) = −9/4
        assert_eq!(ordered_root_difference_product(&p(&[-1, 1, 2])).unwrap(), rat(-9, 4));
        // {1/2} vs {3}: 1/2 − 3 = −5/2
        let v = cross_root_difference_product(&p(&[-1, 2]), &p(&[-3, 1])).unwrap();
        assert_eq!(v, rat(-5, 2));
    }
}
