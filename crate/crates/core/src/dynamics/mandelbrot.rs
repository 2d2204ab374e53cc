use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::green::canonical_height_point;
use super::map::{ProjPoint, RationalMapQ};
use crate::arith::integer::BigRat;
use crate::arith::poly::IntPoly;
use crate::arith::roots::{ComplexApprox, RootProblem, aberth};
use crate::error::{Error, Result};
use crate::heights::AlgebraicSet;

/// Largest degree in `c` accepted for parameter polynomials.
pub const PARAM_DEGREE_BUDGET: usize = 1 << 13;
/// Above this modulus the orbit is followed through logarithms only.
const HUGE: f64 = 1e50;

fn param_degree(d: usize, n: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    if n == 0 {
        return Ok(0);
    }
    d.checked_pow(n as u32 - 1)
        .filter(|&k| k <= PARAM_DEGREE_BUDGET)
        .ok_or_else(|| Error::BudgetExceeded(format!("parameter degree {d}^{}", n - 1)))
}

/// `P_c^n(0)` as an integer polynomial in `c`, for `P_c(z) = z^D + c`.
pub fn critical_orbit_poly(d: usize, n: usize) -> Result<IntPoly> {
    param_degree(d, n)?;
    let c = IntPoly::x();
    let mut g = IntPoly::zero();
    for _ in 0..n {
        g = &g.pow(d as u32) + &c;
    }
    Ok(g)
}

/// Parameters `c` with `P_c^n(0) = P_c^m(0)`: the squarefree primitive part of the difference.
pub fn critically_finite_params(d: usize, n: usize, m: usize) -> Result<AlgebraicSet> {
    if m >= n {
        return Err(Error::Inadmissible(format!("need m < n, got m = {m}, n = {n}")));
    }
    let diff = &critical_orbit_poly(d, n)? - &critical_orbit_poly(d, m)?;
    AlgebraicSet::from_poly(&diff.squarefree_part())
}

/// Exact mean of the roots of `P_c^n(0)`.
pub fn critical_root_mean(d: usize, n: usize) -> Result<BigRat> {
    critical_orbit_poly(d, n)?.root_mean()
}

/// Newton data for `c ↦ P_c^n(0)` by the orbit recursion; avoids expanding coefficients.
struct CriticalOrbit {
    d: usize,
    n: usize,
}

impl CriticalOrbit {
    /// `(log|z_n|, z_n'/z_n)` with `z_{k+1} = z_k^D + c`, `z'_{k+1} = D z_k^{D−1} z'_k + 1`.
    fn log_and_ratio(&self, c: Complex64) -> (f64, Complex64) {
        let df = self.d as f64;
        let (mut z, mut dz) = (Complex64::zero(), Complex64::zero());
        for k in 0..self.n {
            if z.norm() > HUGE {
                // z_{k+1} ≈ z_k^D: ratio and log scale by D each step
                let steps = (self.n - k) as i32;
                let scale = df.powi(steps);
                return (z.norm().ln() * scale, dz / z * scale);
            }
            let zd1 = if self.d == 1 { Complex64::one() } else { z.powu(self.d as u32 - 1) };
            dz = zd1 * dz * df + 1.0;
            z = zd1 * z + c;
        }
        (z.norm().ln(), dz / z)
    }
}

impl RootProblem for CriticalOrbit {
    fn degree(&self) -> usize {
        self.d.pow(self.n as u32 - 1)
    }

    fn newton_correction(&self, c: Complex64) -> Complex64 {
        let (_, ratio) = self.log_and_ratio(c);
        ratio.inv()
    }

    fn log_abs_monic(&self, c: Complex64) -> f64 {
        self.log_and_ratio(c).0
    }

    fn initial_radius(&self) -> f64 {
        2.0
    }
}

/// Complex roots of `P_c^n(0)` (with `c = 0` included), by Aberth on the orbit recursion.
pub fn critical_param_cloud(d: usize, n: usize, tol: f64) -> Result<Vec<ComplexApprox>> {
    if n == 0 {
        return Err(Error::DegreeTooSmall(0));
    }
    param_degree(d, n)?;
    aberth(&CriticalOrbit { d, n }, tol)
}

/// `D^{−depth} log⁺|P_c^{depth}(0)|`.
pub fn bifurcation_green(c: Complex64, d: usize, depth: usize) -> f64 {
    let df = d as f64;
    let mut z = Complex64::zero();
    for k in 0..depth {
        if z.norm() > HUGE {
            // remaining steps multiply log|z| by D each
            return z.norm().ln() * df.powi(-(k as i32));
        }
        z = z.powu(d as u32) + c;
    }
    z.norm().ln().max(0.0) * df.powi(-(depth as i32))
}

/// `h_{M_D}(c) = D^{−1} h_{P_c}(c)`.
pub fn mandel_height(c: &BigRat, d: usize) -> Result<f64> {
    let r = RationalMapQ::unicritical(d, c)?;
    Ok(canonical_height_point(&r, &ProjPoint::from_rat(c))? / d as f64)
}

/// Coefficient of `c^{k}` in `P_c^n(0)` for callers that want raw integers.
pub fn critical_orbit_coeff(d: usize, n: usize, k: usize) -> Result<BigInt> {
    Ok(critical_orbit_poly(d, n)?.coeff(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};

    #[test]
    fn small_parameter_sets() {
        let f = critically_finite_params(2, 2, 0).unwrap();
        assert_eq!(f.min_poly(), &IntPoly::from_i64(&[0, 1, 1]));
        // period dividing 3 minus fixed points of the critical orbit
        let g = critical_orbit_poly(2, 3).unwrap();
        assert_eq!(g, IntPoly::from_i64(&[0, 1, 1, 2, 1]));
        assert!(critically_finite_params(2, 2, 2).is_err());
    }

    #[test]
    fn root_means() {
        for n in 2..=8 {
            assert_eq!(critical_root_mean(2, n).unwrap(), rat(-1, 2));
        }
        // D = 3: P_c^n(0) has no c^{deg−1} term for n ≥ 2
        assert_eq!(critical_root_mean(3, 3).unwrap(), rat_int(0));
    }

    #[test]
    fn clouds_match_exact_polynomial() {
        let roots = critical_param_cloud(2, 5, 1e-10).unwrap();
        assert_eq!(roots.len(), 16);
        let g = critical_orbit_poly(2, 5).unwrap();
        for r in &roots {
            assert!(g.eval_complex(r.value()).norm() < 1e-6);
            assert!(r.abs() <= 2.0 + 1e-9);
        }
        let mean: Complex64 = roots.iter().map(|r| r.value()).sum::<Complex64>() / 16.0;
        assert!((mean.re + 0.5).abs() < 1e-9 && mean.im.abs() < 1e-9);
    }

    #[test]
    fn green_and_height() {
        assert_eq!(bifurcation_green(Complex64::new(-1.0, 0.0), 2, 30), 0.0);
        let g = bifurcation_green(Complex64::new(3.0, 0.0), 2, 60);
        assert!((g - bifurcation_green(Complex64::new(3.0, 0.0), 2, 40)).abs() < 1e-12);
        assert!(g > 0.0);
        assert_eq!(mandel_height(&rat_int(0), 2).unwrap(), 0.0);
        assert!(mandel_height(&rat_int(-2), 2).unwrap().abs() < 1e-12);
        assert!(mandel_height(&rat(1, 3), 2).unwrap() > 0.0);
    }
}
