use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::map::{RationalMapQ, horner_f64};
use crate::error::{Error, Result};

/// Inflation applied to the sampled Lipschitz constant.
pub const LIPSCHITZ_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// Sampled spherical Lipschitz constant, inflated.
    pub lipschitz: f64,
    /// `min(1, log D / log M)`.
    pub kappa: f64,
    pub samples: usize,
}

/// Chordal distance between `[a0 : a1]` and `[b0 : b1]`.
fn chordal(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    let cross = (a.0 * b.1 - a.1 * b.0).norm();
    let na = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt();
    let nb = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    2.0 * cross / (na * nb)
}

/// A uniform point of the Riemann sphere in homogeneous coordinates.
fn sphere_point(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    let t: f64 = rng.gen_range(-1.0..1.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - t * t).sqrt();
    // stereographic projection from the north pole: z = (x + iy)/(1 − t)
    let (x, y) = (s * phi.cos(), s * phi.sin());
    (Complex64::new(x, y), Complex64::new(1.0 - t, 0.0))
}

fn apply_hom(r: &RationalMapQ, p: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let d = r.degree();
    let (x0, x1) = p;
    if x0.norm() <= x1.norm() {
        let z = x0 / x1;
        (horner_f64(r.num(), z), horner_f64(r.den(), z))
    } else {
        let w = x1 / x0;
        (rev_eval(r.num(), d, w), rev_eval(r.den(), d, w))
    }
}

/// `Σ_i c_i w^{d−i}`, the lift at `[1 : w]`.
fn rev_eval(p: &crate::arith::poly::IntPoly, d: usize, w: Complex64) -> Complex64 {
    (0..=d).fold(Complex64::new(0.0, 0.0), |acc, i| {
        acc * w + num_traits::ToPrimitive::to_f64(&p.coeff(i)).unwrap_or(f64::NAN)
    })
}

/// `κ = log D / log M` for a sampled spherical Lipschitz constant `M` of `R`, clamped to `(0, 1]`.
pub fn holder_exponent(r: &RationalMapQ, samples: usize, seed: u64) -> Result<HolderEstimate> {
    let d = r.degree();
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    if samples == 0 {
        return Err(Error::InvalidMeasure("no samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: f64 = 0.0;
    for _ in 0..samples {
        let a = sphere_point(&mut rng);
        for scale in [1e-2, 1e-4, 1e-6] {
            let delta = Complex64::from_polar(scale, rng.gen_range(0.0..std::f64::consts::TAU));
            let b = (a.0 + delta * a.1.norm().max(a.0.norm()), a.1);
            let dist = chordal(a, b);
            if !(dist > 0.0) {
                continue;
            }
            let ratio = chordal(apply_hom(r, a), apply_hom(r, b)) / dist;
            if ratio.is_finite() {
                m = m.max(ratio);
            }
        }
    }
    let lipschitz = (m * LIPSCHITZ_SAFETY).max(d as f64 * LIPSCHITZ_SAFETY);
    if !lipschitz.is_finite() {
        return Err(Error::InvalidMeasure("degenerate Lipschitz sampling".into()));
    }
    let kappa = ((d as f64).ln() / lipschitz.ln()).min(1.0);
    Ok(HolderEstimate { lipschitz, kappa, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_maps() {
        for d in 2..=4usize {
            let mut c = vec![0i64; d + 1];
            c[d] = 1;
            let r = RationalMapQ::polynomial(&crate::arith::poly::IntPoly::from_i64(&c)).unwrap();
            let h = holder_exponent(&r, 4000, 1).unwrap();
            // the spherical derivative of z^D peaks at D on the unit circle
            assert!((h.lipschitz / LIPSCHITZ_SAFETY - d as f64).abs() < 0.05 * d as f64, "{h:?}");
            assert!(h.kappa > 0.85 && h.kappa <= 1.0);
        }
    }

    #[test]
    fn always_in_unit_interval() {
        for s in ["-1,0,1", "1,0,1|0,1", "5,0,7|3,0,0,1"] {
            let h = holder_exponent(&RationalMapQ::parse(s).unwrap(), 500, 2).unwrap();
            assert!(h.kappa > 0.0 && h.kappa <= 1.0);
        }
    }
}
