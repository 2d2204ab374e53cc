//! Simultaneous (Aberth–Ehrlich) complex root finding with a-posteriori
//! inclusion radii.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::integer::{BigRat, ln_abs_bigint};
use super::poly::IntPoly;
use crate::error::{Error, Result};

/// A complex number together with a guaranteed error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub radius_bound: f64,
}

impl ComplexApprox {
    pub fn exact(z: Complex64) -> Self {
        ComplexApprox { re: z.re, im: z.im, radius_bound: 0.0 }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.value().norm()
    }
}

pub const MAX_ITERATIONS: usize = 1000;

/// Polynomial access needed by the simultaneous iteration.
pub trait RootProblem {
    fn degree(&self) -> usize;
    /// Newton correction `p(z)/p′(z)`.
    fn newton_correction(&self, z: Complex64) -> Complex64;
    /// `log |p(z) / lc(p)|`.
    fn log_abs_monic(&self, z: Complex64) -> f64;
    /// Radius of the circle of starting points; all roots should lie inside.
    fn initial_radius(&self) -> f64;
}

/// Horner evaluation of an integer polynomial in floating point.
pub struct HornerProblem {
    coeffs: Vec<f64>,
    rev: Vec<f64>,
    cauchy: f64,
    log_lc: f64,
}

impl HornerProblem {
    pub fn new(p: &IntPoly) -> Self {
        let coeffs = p.scaled_f64_coeffs();
        let lc = *coeffs.last().unwrap();
        let cauchy = 1.0
            + coeffs[..coeffs.len() - 1]
                .iter()
                .map(|c| (c / lc).abs())
                .fold(0.0, f64::max);
        let mut rev = coeffs.clone();
        rev.reverse();
        HornerProblem { log_lc: lc.abs().ln(), coeffs, rev, cauchy }
    }

    fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }
}

impl RootProblem for HornerProblem {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn newton_correction(&self, z: Complex64) -> Complex64 {
        let d = self.degree() as f64;
        if z.norm() <= 1.0 {
            let (p, dp) = Self::horner(&self.coeffs, z);
            p / dp
        } else {
            // p(z) = z^d q(1/z): p/p′ = 1 / (w (d − w q′(w)/q(w))), w = 1/z.
            let w = z.inv();
            let (q, dq) = Self::horner(&self.rev, w);
            (w * (d - w * dq / q)).inv()
        }
    }

    fn log_abs_monic(&self, z: Complex64) -> f64 {
        let d = self.degree() as f64;
        if z.norm() <= 1.0 {
            Self::horner(&self.coeffs, z).0.norm().ln() - self.log_lc
        } else {
            let w = z.inv();
            d * z.norm().ln() + Self::horner(&self.rev, w).0.norm().ln() - self.log_lc
        }
    }

    fn initial_radius(&self) -> f64 {
        self.cauchy
    }
}

/// Aberth iteration from `d` points on a circle; deterministic. Each root is
/// certified to `tol·max(1, |z|)`.
pub fn aberth<P: RootProblem + ?Sized>(problem: &P, tol: f64) -> Result<Vec<ComplexApprox>> {
    let d = problem.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let radius = problem.initial_radius();
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut converged = vec![false; d];
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    let mut bounds = vec![f64::INFINITY; d];
    let mut polish = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut all_done = true;
        for i in 0..d {
            if converged[i] {
                continue;
            }
            let n = problem.newton_correction(z[i]);
            if !n.is_finite() {
                // Exact hit or overflow: leave the point, bounds decide.
                converged[i] = true;
                continue;
            }
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = n / (Complex64::new(1.0, 0.0) - n * s);
            if w.is_finite() {
                z[i] -= w;
            }
            if w.norm() <= 1e-3 * tol.min(1e-3) * (1.0 + z[i].norm()) || !w.is_finite() {
                converged[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            inclusion_radii(problem, &z, &mut bounds);
            best = relative_worst(&z, &bounds);
            if best <= tol {
                break;
            }
            // Clusters may need extra sweeps once the radii are known.
            polish += 1;
            if polish > 20 {
                break;
            }
            converged.iter_mut().for_each(|c| *c = false);
            for ((c, b), zi) in converged.iter_mut().zip(&bounds).zip(&z) {
                *c = *b <= tol * zi.norm().max(1.0);
            }
        }
    }
    if best.is_infinite() {
        inclusion_radii(problem, &z, &mut bounds);
        best = relative_worst(&z, &bounds);
    }
    if !(best <= tol) {
        return Err(Error::RootsNotConverged { best_bound: best, iterations });
    }
    Ok(z
        .iter()
        .zip(&bounds)
        .map(|(z, &r)| ComplexApprox { re: z.re, im: z.im, radius_bound: r })
        .collect())
}

/// Largest `radius / max(1, |z|)`: absolute below the unit circle, relative above it.
fn relative_worst(z: &[Complex64], bounds: &[f64]) -> f64 {
    z.iter().zip(bounds).map(|(z, b)| b / z.norm().max(1.0)).fold(0.0, f64::max)
}

/// Inclusion radii `d·|W_i|` with Weierstrass corrections
/// `W_i = p(z_i) / (lc ∏_{j≠i} (z_i − z_j))`.
fn inclusion_radii<P: RootProblem + ?Sized>(problem: &P, z: &[Complex64], out: &mut [f64]) {
    let d = z.len();
    for i in 0..d {
        let log_p = problem.log_abs_monic(z[i]);
        let log_prod: f64 = (0..d)
            .filter(|&j| j != i)
            .map(|j| (z[i] - z[j]).norm().ln())
            .sum();
        let r = (d as f64) * (log_p - log_prod).exp();
        // Rounding floor: a root computed in double precision is never better than this.
        out[i] = r.max(4.0 * f64::EPSILON * z[i].norm());
        if !out[i].is_finite() {
            out[i] = f64::INFINITY;
        }
    }
}

/// All `deg P` complex roots of an integer polynomial, each within `tol`
/// (relative to `|z|` for roots outside the unit disk).
pub fn complex_roots(p: &IntPoly, tol: f64) -> Result<Vec<ComplexApprox>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::DegreeTooSmall(0));
    }
    if !(tol > 0.0) {
        return Err(Error::Quadrature(tol));
    }
    // Roots at the origin are exact; the rest of the polynomial is deflated.
    let zeros = p.low_order();
    let rest = IntPoly::new(p.coeffs()[zeros..].to_vec());
    let mut roots = vec![ComplexApprox::exact(Complex64::zero()); zeros];
    if rest.degree() == 1 {
        let q = BigRat::new(-rest.coeff(0), rest.coeff(1));
        roots.push(ComplexApprox::exact(Complex64::new(
            super::integer::rat_to_f64(&q),
            0.0,
        )));
        return Ok(roots);
    }
    if rest.degree() > 1 {
        roots.extend(aberth(&HornerProblem::new(&rest), tol)?);
    }
    Ok(roots)
}

/// `log M(P) = log |lc(P)| + Σ_{|α|>1} log |α|`.
pub fn mahler_measure(p: &IntPoly, tol: f64) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let log_lc = ln_abs_bigint(&p.lc());
    if p.degree() == 0 {
        return Ok(log_lc);
    }
    let roots = complex_roots(p, tol)?;
    Ok(log_lc + roots.iter().map(|r| r.abs().ln().max(0.0)).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut r: Vec<ComplexApprox>) -> Vec<ComplexApprox> {
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        r
    }

    #[test]
    fn quadratic_examples() {
        let r = sorted(complex_roots(&IntPoly::from_i64(&[1, 0, 1]), 1e-12).unwrap());
        assert!((r[0].value() - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1].value() - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let r = sorted(complex_roots(&IntPoly::from_i64(&[-1, -1, 1]), 1e-12).unwrap());
        // quadratic formula oracle
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r[0].re - (1.0 - phi)).abs() < 1e-12);
        assert!((r[1].re - phi).abs() < 1e-12);
        assert!(r.iter().all(|z| z.radius_bound <= 1e-12));
    }

    #[test]
    fn fourth_roots_of_unity() {
        let r = complex_roots(&IntPoly::from_i64(&[-1, 0, 0, 0, 1]), 1e-12).unwrap();
        for target in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let t = Complex64::new(target.0, target.1);
            assert!(r.iter().any(|z| (z.value() - t).norm() < 1e-12));
        }
    }

    #[test]
    fn root_at_origin_and_linear() {
        let r = complex_roots(&IntPoly::from_i64(&[0, 0, -1, 2]), 1e-12).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().filter(|z| z.abs() == 0.0).count() == 2);
        assert!(r.iter().any(|z| (z.re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn mahler_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let m = mahler_measure(&IntPoly::from_i64(&[-1, -1, 1]), 1e-12).unwrap();
        assert!((m - phi.ln()).abs() < 1e-12);
        assert!((m - 0.4812118).abs() < 1e-7);
        let cyclo12 = IntPoly::from_i64(&[1, 0, -1, 0, 1]);
        assert!(mahler_measure(&cyclo12, 1e-12).unwrap().abs() < 1e-10);
        let m = mahler_measure(&IntPoly::from_i64(&[-1, 2]), 1e-12).unwrap();
        assert!((m - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn wilkinson_like_degree_twenty() {
        let mut p = IntPoly::one();
        for k in 1..=12 {
            p = &p * &IntPoly::from_i64(&[-k, 1]);
        }
        let r = sorted(complex_roots(&p, 1e-6).unwrap());
        for (k, z) in r.iter().enumerate() {
            assert!((z.re - (k + 1) as f64).abs() < 1e-6, "{z:?}");
        }
    }
}
