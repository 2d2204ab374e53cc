use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::integer::{BigRat, rat_to_f64};
use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointC {
    Finite(Complex64),
    Infinity,
}

impl PointC {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            PointC::Finite(z) => Some(*z),
            PointC::Infinity => None,
        }
    }
}

impl From<Complex64> for PointC {
    fn from(z: Complex64) -> Self {
        PointC::Finite(z)
    }
}

/// Chordal distance `|z−w| / √((1+|z|²)(1+|w|²))`, at most 1.
pub fn spherical_distance(a: PointC, b: PointC) -> f64 {
    match (a, b) {
        (PointC::Infinity, PointC::Infinity) => 0.0,
        (PointC::Finite(z), PointC::Infinity) | (PointC::Infinity, PointC::Finite(z)) => {
            1.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (PointC::Finite(z), PointC::Finite(w)) => {
            (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// A finitely supported signed measure on the Riemann sphere.
#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub struct AtomicMeasureC {
    atoms: Vec<(PointC, BigRat)>,
}

impl AtomicMeasureC {
    pub fn new(atoms: Vec<(PointC, BigRat)>) -> Self {
        AtomicMeasureC { atoms }
    }

    /// `[F]` for a list of points (repeats count with multiplicity).
    pub fn uniform<I: IntoIterator<Item = PointC>>(points: I) -> Self {
        let pts: Vec<PointC> = points.into_iter().collect();
        let w = BigRat::new(1.into(), (pts.len().max(1) as u64).into());
        AtomicMeasureC { atoms: pts.into_iter().map(|z| (z, w.clone())).collect() }
    }

    pub fn dirac(z: PointC) -> Self {
        AtomicMeasureC { atoms: vec![(z, BigRat::from_integer(1.into()))] }
    }

    pub fn atoms(&self) -> &[(PointC, BigRat)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> BigRat {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.atoms.iter().all(|(_, w)| !w.is_negative()) && self.total_mass() == BigRat::from_integer(1.into())
    }

    pub fn translate(&self, c: Complex64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|(z, w)| {
                let z = match z {
                    PointC::Finite(z) => PointC::Finite(z + c),
                    PointC::Infinity => PointC::Infinity,
                };
                (z, w.clone())
            })
            .collect();
        AtomicMeasureC { atoms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|(z, w)| (*z, -w.clone())));
        AtomicMeasureC { atoms }
    }

    /// `∫ f dμ` over finite atoms.
    pub fn integrate<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        ordered_sum(
            self.atoms
                .iter()
                .filter_map(|(z, w)| z.finite().map(|z| rat_to_f64(w) * f(z))),
        )
    }

    pub fn finite_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.atoms.iter().filter_map(|(z, _)| z.finite())
    }
}

/// Summation independent of the iteration order of the terms.
pub(crate) fn ordered_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut v: Vec<f64> = terms.into_iter().collect();
    v.sort_by(f64::total_cmp);
    // Neumaier compensation on the sorted terms.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Result of an atomic energy sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyValue {
    pub value: f64,
    /// Pairs at the same point, excluded from the sum.
    pub diagonal_pairs: usize,
    /// Atoms at ∞, excluded from the sum.
    pub dropped_infinite: usize,
}

/// `(ρ, ρ′) = −Σ w_i w′_j log|z_i − z′_j|` over finite off-diagonal pairs.
pub fn energy_atomic(rho: &AtomicMeasureC, rho2: &AtomicMeasureC) -> EnergyValue {
    let mut diagonal_pairs = 0;
    let dropped_infinite = rho.atoms.iter().chain(&rho2.atoms).filter(|(z, _)| *z == PointC::Infinity).count();
    let mut terms = Vec::with_capacity(rho.len() * rho2.len());
    for (z, w) in &rho.atoms {
        let PointC::Finite(z) = z else { continue };
        let w = rat_to_f64(w);
        for (z2, w2) in &rho2.atoms {
            let PointC::Finite(z2) = z2 else { continue };
            if z == z2 {
                diagonal_pairs += 1;
                continue;
            }
            terms.push(-w * rat_to_f64(w2) * (z - z2).norm().ln());
        }
    }
    EnergyValue { value: ordered_sum(terms), diagonal_pairs, dropped_infinite }
}

type PotentialFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;
type SamplerFn = Arc<dyn Fn(usize, u64) -> Result<AtomicMeasureC> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    LambdaCircle,
    Equilibrium { map: String, depth: usize },
    Custom(String),
}

/// A probability measure on ℂ known through its potential `g_ρ(z) = ∫ log|z−w| dρ(w)`.
#[derive(Clone)]
pub struct PotentialMeasureC {
    kind: PotentialKind,
    potential: PotentialFn,
    sampler: Option<SamplerFn>,
    self_energy: Option<f64>,
}

impl fmt::Debug for PotentialMeasureC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialMeasureC")
            .field("kind", &self.kind)
            .field("self_energy", &self.self_energy)
            .finish_non_exhaustive()
    }
}

impl PotentialMeasureC {
    pub fn new(kind: PotentialKind, potential: PotentialFn, sampler: Option<SamplerFn>, self_energy: Option<f64>) -> Self {
        PotentialMeasureC { kind, potential, sampler, self_energy }
    }

    /// Normalized arc length on the unit circle; `g = log⁺|z|`, `(λ,λ) = 0`.
    pub fn lambda_circle() -> Self {
        let sampler: SamplerFn = Arc::new(|n, seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(AtomicMeasureC::uniform((0..n).map(|_| {
                PointC::Finite(Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            })))
        });
        PotentialMeasureC {
            kind: PotentialKind::LambdaCircle,
            potential: Arc::new(|z: Complex64| z.norm().ln().max(0.0)),
            sampler: Some(sampler),
            self_energy: Some(0.0),
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn potential(&self, z: Complex64) -> f64 {
        (self.potential)(z)
    }

    /// `(ρ, ρ)` when known in closed form.
    pub fn self_energy(&self) -> Option<f64> {
        self.self_energy
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<AtomicMeasureC> {
        match &self.sampler {
            Some(s) => s(n, seed),
            None => Err(Error::Unsupported("measure has no sampler".into())),
        }
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    /// `([F], ρ) = −∫ g_ρ d[F]` over finite atoms.
    pub fn pairing_atomic(&self, f: &AtomicMeasureC) -> f64 {
        -f.integrate(|z| self.potential(z))
    }

    /// `(ρ, ρ′)`: closed form for the same measure, otherwise `−∫ g_ρ dρ′` on `n` samples of `ρ′`.
    pub fn pairing(&self, other: &PotentialMeasureC, n: usize, seed: u64) -> Result<f64> {
        if self.kind == other.kind {
            if let Some(e) = self.self_energy {
                return Ok(e);
            }
        }
        let s = other.sample(n, seed)?;
        Ok(self.pairing_atomic(&s))
    }
}

/// `η̂(ε)`: largest sampled change of `h` between points at spherical distance `≤ ε`.
pub fn sampled_modulus<F: Fn(Complex64) -> f64>(h: F, eps: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        // Uniform point of the sphere, then a step of chordal length ≤ ε.
        let u: f64 = rng.gen_range(-1.0..1.0);
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let rad = ((1.0 + u) / (1.0 - u).max(1e-300)).sqrt();
        let z = Complex64::from_polar(rad, th);
        let step = eps * (1.0 + z.norm_sqr()) * rng.gen_range(0.0..1.0);
        let w = z + Complex64::from_polar(step, rng.gen_range(0.0..std::f64::consts::TAU));
        if spherical_distance(z.into(), w.into()) <= eps {
            worst = worst.max((h(z) - h(w)).abs());
        }
    }
    worst
}



#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    fn c(re: f64, im: f64) -> PointC {
        PointC::Finite(Complex64::new(re, im))
    }

    #[test]
    fn energy_examples() {
        let e = energy_atomic(&AtomicMeasureC::dirac(c(0.0, 0.0)), &AtomicMeasureC::dirac(c(1.0, 0.0)));
        assert_eq!(e.value, 0.0);
        let e = energy_atomic(&AtomicMeasureC::dirac(c(0.0, 0.0)), &AtomicMeasureC::dirac(c(2.0, 0.0)));
        assert!((e.value + 2f64.ln()).abs() < 1e-15);
        let f = AtomicMeasureC::uniform([c(0.0, 1.0), c(0.0, -1.0)]);
        let e = energy_atomic(&f, &f);
        assert!((e.value + 2f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(e.diagonal_pairs, 2);
    }

    #[test]
    fn infinity_atoms_dropped() {
        let f = AtomicMeasureC::new(vec![(PointC::Infinity, rat(1, 2)), (c(3.0, 0.0), rat(1, 2))]);
        let e = energy_atomic(&f, &AtomicMeasureC::dirac(c(0.0, 0.0)));
        assert!((e.value + 0.5 * 3f64.ln()).abs() < 1e-15);
        assert_eq!(e.dropped_infinite, 1);
    }

    #[test]
    fn spherical_examples() {
        assert!((spherical_distance(c(0.0, 0.0), PointC::Infinity) - 1.0).abs() < 1e-15);
        assert!((spherical_distance(c(1.0, 0.0), c(-1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(spherical_distance(c(2.0, 1.0), c(2.0, 1.0)), 0.0);
    }

    #[test]
    fn lambda_samples_on_circle() {
        let lam = PotentialMeasureC::lambda_circle();
        let s = lam.sample(100, 7).unwrap();
        assert!(s.finite_points().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert_eq!(lam.sample(100, 7).unwrap(), s);
        assert_eq!(lam.potential(Complex64::new(2.0, 0.0)), 2f64.ln());
        assert_eq!(lam.potential(Complex64::new(0.5, 0.0)), 0.0);
    }

    #[test]
    fn modulus_of_zero_potential() {
        assert_eq!(sampled_modulus(|_| 0.0, 0.1, 1000, 1), 0.0);
        let m = sampled_modulus(|z: Complex64| z.re / (1.0 + z.norm_sqr()), 0.01, 5000, 2);
        assert!(m > 0.0 && m < 0.05);
    }
}
