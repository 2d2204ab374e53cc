use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::map::RationalMapQ;
use crate::arith::integer::rat_to_f64;
use crate::arith::roots::{RootProblem, aberth};
use crate::berkovich::AtomicMeasureB;
use crate::complex::measure::{AtomicMeasureC, PointC, PotentialKind, PotentialMeasureC};
use crate::error::{Error, Result};
use crate::heights::{LocalMeasure, Place};

/// Samples discarded at the start of every run.
pub const BURN_IN: usize = 10;
/// Backward-iteration depth used by the sampler attached to equilibrium measures.
pub const SAMPLER_DEPTH: usize = 30;
const ESCAPE_RADIUS: f64 = 1e8;
const MAX_FORWARD: usize = 2000;

/// A polynomial with complex coefficients, ascending order.
struct ComplexPoly {
    c: Vec<Complex64>,
}

impl ComplexPoly {
    fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }
}

impl RootProblem for ComplexPoly {
    fn degree(&self) -> usize {
        self.c.len() - 1
    }

    fn newton_correction(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            let (p, dp) = Self::horner(&self.c, z);
            p / dp
        } else {
            let rev: Vec<Complex64> = self.c.iter().rev().copied().collect();
            let w = z.inv();
            let (q, dq) = Self::horner(&rev, w);
            (w * (self.degree() as f64 - w * dq / q)).inv()
        }
    }

    fn log_abs_monic(&self, z: Complex64) -> f64 {
        let lc = self.c.last().expect("nonempty").norm();
        Self::horner(&self.c, z).0.norm().ln() - lc.ln()
    }

    fn initial_radius(&self) -> f64 {
        let lc = self.c.last().expect("nonempty").norm();
        1.0 + self.c[..self.c.len() - 1].iter().map(|a| a.norm() / lc).fold(0.0, f64::max)
    }
}

fn coeffs_f64(r: &RationalMapQ) -> (Vec<f64>, Vec<f64>) {
    let conv = |p: &crate::arith::poly::IntPoly| -> Vec<f64> {
        (0..=r.degree()).map(|i| p.coeff(i).to_f64().unwrap_or(f64::NAN)).collect()
    };
    (conv(r.num()), conv(r.den()))
}

/// Finite solutions `w` of `R(w) = z`, with multiplicity.
pub fn preimages(r: &RationalMapQ, z: Complex64, tol: f64) -> Result<Vec<Complex64>> {
    let (num, den) = coeffs_f64(r);
    preimages_f64(&num, &den, z, tol)
}

fn preimages_f64(num: &[f64], den: &[f64], z: Complex64, tol: f64) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = num.iter().zip(den).map(|(&a, &b)| a - z * b).collect();
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().expect("nonempty").norm() <= 1e-14 * scale {
        c.pop();
    }
    match c.len() {
        0 | 1 => Ok(Vec::new()),
        2 => Ok(vec![-c[0] / c[1]]),
        3 => {
            // roots of a w² + b w + c without cancellation
            let (a, b, c0) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * c0).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
            if q.norm() == 0.0 {
                return Ok(vec![Complex64::zero(), Complex64::zero()]);
            }
            Ok(vec![q / a, c0 / q])
        }
        _ => Ok(aberth(&ComplexPoly { c }, tol)?.into_iter().map(|r| r.value()).collect()),
    }
}

/// `count` points approximating `ρ_{R,∞}` by `n` steps of random inverse
/// branches started from uniform points of the unit circle.
pub fn equilibrium_sample(r: &RationalMapQ, n: usize, count: usize, seed: u64) -> Result<AtomicMeasureC> {
    if r.degree() < 2 {
        return Err(Error::DegreeTooSmall(r.degree()));
    }
    let (num, den) = coeffs_f64(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    for i in 0..count + BURN_IN {
        let mut z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        for _ in 0..n {
            let pre = preimages_f64(&num, &den, z, 1e-14)?;
            if pre.is_empty() {
                return Err(Error::RootsNotConverged { best_bound: f64::INFINITY, iterations: 0 });
            }
            z = pre[rng.gen_range(0..pre.len())];
        }
        if i >= BURN_IN {
            points.push(PointC::Finite(z));
        }
    }
    Ok(AtomicMeasureC::uniform(points))
}

/// `G(z) = lim D^{−n} log⁺|P^n(z)|` for a polynomial map.
pub fn polynomial_escape_rate(r: &RationalMapQ, z: Complex64) -> Result<f64> {
    let a = r.polynomial_lc().ok_or_else(|| Error::Unsupported("escape rate of a non-polynomial map".into()))?;
    let (num, den) = coeffs_f64(r);
    let d = r.degree() as f64;
    let shift = rat_to_f64(&a).abs().ln() / (d - 1.0);
    let mut z = z;
    let mut w = 1.0;
    for _ in 0..MAX_FORWARD {
        if z.norm() > ESCAPE_RADIUS {
            // G(z) = log|z| + log|a|/(D − 1) + O(|z|^{−1})
            return Ok(w * (z.norm().ln() + shift));
        }
        let p = num.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c) / den[0];
        z = p;
        w /= d;
        if w < 1e-300 {
            break;
        }
    }
    Ok(0.0)
}

/// `ρ_{R,v}`: `λ_p` at places of good reduction; at ∞ the equilibrium measure of
/// a polynomial map, with potential `G − log|a|/(D−1)` and `(ρ,ρ) = log|a|/(D−1)`.
pub fn equilibrium_local_measure(r: &RationalMapQ, v: Place) -> Result<LocalMeasure> {
    if r.degree() < 2 {
        return Err(Error::DegreeTooSmall(r.degree()));
    }
    match v {
        Place::Finite(p) => {
            if super::good_reduction(r, p)? {
                Ok(LocalMeasure::Finite(AtomicMeasureB::lambda(p)?))
            } else {
                Err(Error::Unsupported(format!("equilibrium measure at a prime of bad reduction ({p})")))
            }
        }
        Place::Archimedean => {
            let a = r.polynomial_lc().ok_or_else(|| {
                Error::Unsupported("archimedean equilibrium measure of a non-polynomial map".into())
            })?;
            let cap = rat_to_f64(&a).abs().ln() / (r.degree() as f64 - 1.0);
            let pot_map = r.clone();
            let potential = Arc::new(move |z: Complex64| polynomial_escape_rate(&pot_map, z).unwrap_or(f64::NAN) - cap);
            let sample_map = r.clone();
            let sampler = Arc::new(move |n: usize, seed: u64| equilibrium_sample(&sample_map, SAMPLER_DEPTH, n, seed));
            let kind = PotentialKind::Equilibrium { map: r.spec_string(), depth: SAMPLER_DEPTH };
            Ok(LocalMeasure::Archimedean(PotentialMeasureC::new(kind, potential, Some(sampler), Some(cap))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(s: &str) -> RationalMapQ {
        RationalMapQ::parse(s).unwrap()
    }

    #[test]
    fn square_map_samples_the_circle() {
        let s = equilibrium_sample(&map("0,0,1"), 20, 200, 1).unwrap();
        assert_eq!(s.len(), 200);
        assert!(s.finite_points().all(|z| (z.norm() - 1.0).abs() < 1e-8));
    }

    #[test]
    fn chebyshev_samples_the_interval() {
        let s = equilibrium_sample(&map("-2,0,1"), 30, 500, 7).unwrap();
        assert!(s.finite_points().all(|z| z.im.abs() < 1e-6 && z.re.abs() <= 2.0 + 1e-6));
    }

    #[test]
    fn deterministic_in_seed() {
        let r = map("-1,0,1");
        let a = equilibrium_sample(&r, 10, 50, 3).unwrap();
        let b = equilibrium_sample(&r, 10, 50, 3).unwrap();
        assert_eq!(a.atoms(), b.atoms());
    }

    #[test]
    fn cubic_preimages() {
        let r = map("1,-2,0,1|1");
        let z = Complex64::new(0.3, -0.7);
        for w in preimages(&r, z, 1e-14).unwrap() {
            assert!((r.eval_complex(w).unwrap() - z).norm() < 1e-10);
        }
    }

    #[test]
    fn equilibrium_potentials() {
        let rho = equilibrium_local_measure(&map("0,0,1"), Place::Archimedean).unwrap();
        let LocalMeasure::Archimedean(m) = &rho else { panic!() };
        assert!((m.potential(Complex64::new(3.0, 0.0)) - 3f64.ln()).abs() < 1e-12);
        assert_eq!(m.potential(Complex64::new(0.5, 0.0)), 0.0);
        assert_eq!(m.self_energy(), Some(0.0));
        // z² − 2: g = log|ζ| for z = ζ + 1/ζ
        let rho = equilibrium_local_measure(&map("-2,0,1"), Place::Archimedean).unwrap();
        let LocalMeasure::Archimedean(m) = &rho else { panic!() };
        let zeta = Complex64::new(2.0, 1.0);
        assert!((m.potential(zeta + zeta.inv()) - zeta.norm().ln()).abs() < 1e-9);
        assert!(equilibrium_local_measure(&map("1,0,1|0,1"), Place::Archimedean).is_err());
        assert!(equilibrium_local_measure(&map("0,0,1"), Place::Finite(5)).unwrap().is_lambda());
    }
}
