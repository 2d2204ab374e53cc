use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::map::RationalMapQ;
use crate::arith::integer::ln_abs_bigint;
use crate::arith::poly::IntPoly;
use crate::arith::roots::{ComplexApprox, RootProblem, aberth};
use crate::error::{Error, Result};
use crate::heights::AlgebraicSet;
use crate::heights::set::{ROOT_TOL, ROOT_TOL_FALLBACK};

/// Largest `D^n` accepted by [`periodic_points`].
pub const PERIODIC_DEGREE_BUDGET: usize = 1 << 14;

/// Fixed points of `R^n` together with the count lost to multiple roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicPoints {
    #[serde(skip)]
    pub set: AlgebraicSet,
    pub n: usize,
    /// `D^n + 1`, the number of fixed points with multiplicity.
    pub expected: usize,
    /// `expected − |F_n|`.
    pub collisions: usize,
}

/// The solutions in `ℙ¹(ℚ̄)` of `R^n(z) = z`, taken without multiplicity.
pub fn periodic_points(r: &RationalMapQ, n: usize) -> Result<AlgebraicSet> {
    periodic_points_report(r, n).map(|p| p.set)
}

pub fn periodic_points_report(r: &RationalMapQ, n: usize) -> Result<PeriodicPoints> {
    if n == 0 {
        return Err(Error::DegreeTooSmall(0));
    }
    let dn = r
        .degree()
        .checked_pow(n as u32)
        .filter(|&d| d <= PERIODIC_DEGREE_BUDGET)
        .ok_or_else(|| Error::BudgetExceeded(format!("degree {}^{n}", r.degree())))?;
    let (num, den) = r.iterate_lift(n);
    // x1·P₀⁽ⁿ⁾ − x0·P₁⁽ⁿ⁾ has degree D^n + 1; a drop means ∞ is fixed
    let phi = &num - &den.shift_up(1);
    if phi.is_zero() {
        return Err(Error::Inadmissible("R^n is the identity".into()));
    }
    let infinity_fixed = phi.degree() < dn + 1;
    let sf = if phi.degree() == 0 { IntPoly::one() } else { phi.squarefree_part() };
    let mut set = AlgebraicSet::new(&sf, infinity_fixed)?;
    if sf.degree() == phi.degree() && sf.degree() > 1 {
        // no repeated roots: solve on the orbit recursion instead of the expanded coefficients
        if let Ok(roots) = orbit_roots(r, n, &phi) {
            set = set.with_roots(roots)?;
        }
    }
    let expected = dn + 1;
    Ok(PeriodicPoints { collisions: expected - set.len(), set, n, expected })
}

/// `φ(z) = a_n(z) − z b_n(z)` where `(a_k, b_k) = F(a_{k−1}, b_{k−1})`, `(a_0, b_0) = (z, 1)`,
/// evaluated with per-step rescaling.
struct PeriodicProblem {
    num: Vec<f64>,
    den: Vec<f64>,
    n: usize,
    degree: usize,
    log_lc: f64,
    radius: f64,
}

/// `H(a, b) = Σ c_i a^i b^{D−i}` with both partial derivatives.
fn hom_with_partials(c: &[f64], a: Complex64, b: Complex64) -> (Complex64, Complex64, Complex64) {
    let d = c.len() - 1;
    let mut ap = vec![Complex64::new(1.0, 0.0); d + 1];
    let mut bp = vec![Complex64::new(1.0, 0.0); d + 1];
    for i in 1..=d {
        ap[i] = ap[i - 1] * a;
        bp[i] = bp[i - 1] * b;
    }
    let (mut h, mut ha, mut hb) = (Complex64::zero(), Complex64::zero(), Complex64::zero());
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        h += ci * ap[i] * bp[d - i];
        if i > 0 {
            ha += ci * i as f64 * ap[i - 1] * bp[d - i];
        }
        if i < d {
            hb += ci * (d - i) as f64 * ap[i] * bp[d - i - 1];
        }
    }
    (h, ha, hb)
}

impl PeriodicProblem {
    /// `(φ, φ′, log s)` with `φ_true = s·φ`.
    fn eval(&self, z: Complex64) -> (Complex64, Complex64, f64) {
        let one = Complex64::new(1.0, 0.0);
        let (mut a, mut b, mut da, mut db) = (z, one, one, Complex64::zero());
        let mut log_scale = 0.0;
        for _ in 0..self.n {
            let (p0, p0a, p0b) = hom_with_partials(&self.num, a, b);
            let (p1, p1a, p1b) = hom_with_partials(&self.den, a, b);
            let (na, nb) = (p0, p1);
            let (nda, ndb) = (p0a * da + p0b * db, p1a * da + p1b * db);
            let s = na.norm().max(nb.norm());
            if !(s > 0.0) || !s.is_finite() {
                return (na, nda, log_scale);
            }
            a = na / s;
            b = nb / s;
            da = nda / s;
            db = ndb / s;
            log_scale += s.ln();
        }
        (a - z * b, da - b - z * db, log_scale)
    }
}

impl RootProblem for PeriodicProblem {
    fn degree(&self) -> usize {
        self.degree
    }

    fn newton_correction(&self, z: Complex64) -> Complex64 {
        let (p, dp, _) = self.eval(z);
        p / dp
    }

    fn log_abs_monic(&self, z: Complex64) -> f64 {
        let (p, _, s) = self.eval(z);
        p.norm().ln() + s - self.log_lc
    }

    fn initial_radius(&self) -> f64 {
        self.radius
    }
}

/// Fujiwara's bound `2 max_k |c_{d−k}/c_d|^{1/k}` on the moduli of the roots.
fn root_radius(p: &IntPoly) -> f64 {
    let d = p.degree();
    let log_lc = ln_abs_bigint(&p.lc());
    let mut best = f64::NEG_INFINITY;
    for k in 1..=d {
        let c = p.coeff(d - k);
        if !c.is_zero() {
            best = best.max((ln_abs_bigint(&c) - log_lc) / k as f64);
        }
    }
    if best.is_finite() { 2.0 * best.exp() } else { 1.0 }
}

/// Roots of `φ = num_n − z·den_n` through the orbit recursion; `phi` supplies degree and leading coefficient.
fn orbit_roots(r: &RationalMapQ, n: usize, phi: &IntPoly) -> Result<Vec<ComplexApprox>> {
    let conv = |p: &IntPoly| -> Vec<f64> {
        (0..=r.degree()).map(|i| p.coeff(i).to_f64().unwrap_or(f64::NAN)).collect()
    };
    let problem = PeriodicProblem {
        num: conv(r.num()),
        den: conv(r.den()),
        n,
        degree: phi.degree(),
        log_lc: ln_abs_bigint(&phi.lc()),
        radius: root_radius(phi),
    };
    match aberth(&problem, ROOT_TOL) {
        Err(Error::RootsNotConverged { best_bound, .. }) if best_bound <= ROOT_TOL_FALLBACK => {
            aberth(&problem, (4.0 * best_bound).min(ROOT_TOL_FALLBACK))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = periodic_points(&RationalMapQ::parse("0,0,1").unwrap(), 2).unwrap();
        assert_eq!(f.min_poly(), &IntPoly::from_i64(&[0, -1, 0, 0, 1]));
        assert!(f.contains_infinity());
        let f = periodic_points(&RationalMapQ::parse("-1,0,1").unwrap(), 1).unwrap();
        assert_eq!(f.min_poly(), &IntPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn degree_count() {
        let r = RationalMapQ::parse("1,0,1").unwrap();
        for n in 1..=4 {
            let p = periodic_points_report(&r, n).unwrap();
            assert_eq!(p.set.finite_len(), 1 << n);
            assert_eq!(p.collisions, 0);
        }
        // z² − 1 has the 2-cycle {0, −1}, which also solves R²(z) = z exactly once
        let p = periodic_points_report(&RationalMapQ::parse("-1,0,1").unwrap(), 2).unwrap();
        assert_eq!(p.set.finite_len(), 4);
    }

    #[test]
    fn rational_map_infinity() {
        // (z²+1)/z fixes ∞
        let p = periodic_points_report(&RationalMapQ::parse("1,0,1|0,1").unwrap(), 1).unwrap();
        assert!(p.set.contains_infinity());
        assert_eq!(p.set.min_poly(), &IntPoly::one());
        assert_eq!(p.collisions, 2);
    }

    #[test]
    fn orbit_roots_are_fixed() {
        let r = RationalMapQ::parse("-1,0,1").unwrap();
        let f = periodic_points(&r, 6).unwrap();
        let roots = f.roots().unwrap();
        assert_eq!(roots.len(), 64);
        for z in roots {
            let mut w = z.value();
            for _ in 0..6 {
                w = w * w - 1.0;
            }
            assert!((w - z.value()).norm() < 1e-8);
        }
        let m = RationalMapQ::parse("1,0,1|0,1").unwrap();
        let f = periodic_points(&m, 3).unwrap();
        let exact = crate::arith::roots::complex_roots(f.min_poly(), 1e-10).unwrap();
        for z in f.roots().unwrap() {
            assert!(exact.iter().any(|e| (e.value() - z.value()).norm() < 1e-8));
        }
    }
}
