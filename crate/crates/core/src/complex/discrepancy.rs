use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::measure::{AtomicMeasureC, PotentialMeasureC, spherical_distance};
use super::quad::periodic_mean;
use crate::error::{Error, Result};

type EvalFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

/// A test function on the Riemann sphere with a spherical Lipschitz constant.
#[derive(Clone)]
pub struct TestFunctionC {
    name: String,
    eval: EvalFn,
    lipschitz_bound: f64,
    exact_integrals: BTreeMap<String, f64>,
}

impl fmt::Debug for TestFunctionC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunctionC")
            .field("name", &self.name)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish_non_exhaustive()
    }
}

/// Radius of the disk over which Lipschitz constants of the built-in test
/// functions are taken; all measures used with them live inside it.
pub const LIP_RADIUS: f64 = 2.0;

impl TestFunctionC {
    pub fn new(name: &str, eval: EvalFn, lipschitz_bound: f64) -> Self {
        TestFunctionC { name: name.to_string(), eval, lipschitz_bound, exact_integrals: BTreeMap::new() }
    }

    /// Lipschitz constant estimated on the disk `|z| ≤ radius`.
    pub fn with_sampled_lipschitz(name: &str, eval: EvalFn, radius: f64) -> Self {
        let lip = sampled_lipschitz(&*eval, radius);
        Self::new(name, eval, lip)
    }

    pub fn with_integral(mut self, measure: &str, value: f64) -> Self {
        self.exact_integrals.insert(measure.to_string(), value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn exact_integral(&self, measure: &str) -> Option<f64> {
        self.exact_integrals.get(measure).copied()
    }

    pub fn re() -> Self {
        let f: EvalFn = Arc::new(|z: Complex64| z.re);
        // |∇| = 1 and the chordal line element is |dz|/(1+|z|²).
        Self::new("re", f, 1.0 + LIP_RADIUS * LIP_RADIUS).with_integral("lambda_circle", 0.0)
    }

    pub fn im() -> Self {
        let f: EvalFn = Arc::new(|z: Complex64| z.im);
        Self::new("im", f, 1.0 + LIP_RADIUS * LIP_RADIUS).with_integral("lambda_circle", 0.0)
    }

    pub fn exp_re() -> Self {
        let f: EvalFn = Arc::new(|z: Complex64| z.re.exp());
        let integral = periodic_mean(|t| t.cos().exp(), 1e-15, 1 << 12).expect("smooth periodic integrand");
        Self::with_sampled_lipschitz("exp_re", f, LIP_RADIUS).with_integral("lambda_circle", integral)
    }

    /// Gaussian bump `exp(−4|z − 1|²)`.
    pub fn bump() -> Self {
        let f: EvalFn = Arc::new(|z: Complex64| (-4.0 * (z - 1.0).norm_sqr()).exp());
        let integral = periodic_mean(|t| (-8.0 + 8.0 * t.cos()).exp(), 1e-15, 1 << 12).expect("smooth");
        Self::with_sampled_lipschitz("bump", f, LIP_RADIUS).with_integral("lambda_circle", integral)
    }

    /// `min(|z|², 4)`.
    pub fn abs2_capped() -> Self {
        let f: EvalFn = Arc::new(|z: Complex64| z.norm_sqr().min(4.0));
        Self::with_sampled_lipschitz("abs2_capped", f, LIP_RADIUS).with_integral("lambda_circle", 1.0)
    }
}

/// Largest ratio `|f(z) − f(w)| / d(z,w)` over a polar grid of short steps.
pub fn sampled_lipschitz(f: &(dyn Fn(Complex64) -> f64 + Send + Sync), radius: f64) -> f64 {
    let h = 1e-6;
    let mut best: f64 = 0.0;
    for i in 0..=120 {
        let r = radius * i as f64 / 120.0;
        for j in 0..120 {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 120.0);
            for dir in 0..8 {
                let w = z + Complex64::from_polar(h, std::f64::consts::TAU * dir as f64 / 8.0);
                let d = spherical_distance(z.into(), w.into());
                best = best.max((f(z) - f(w)).abs() / d);
            }
        }
    }
    best
}

/// Both sides of the quantitative equidistribution estimate for one test function.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiscrepancyReport {
    pub size: usize,
    pub height: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub lip: f64,
    /// `lhs / (Lip(φ)·log|F|/|F|)`, the constant the rate needs.
    pub ratio: f64,
    /// Declared error of `∫φ dρ` when it was estimated by sampling.
    pub sampling_error: f64,
}

/// `lhs = |avg_F φ − ∫φ dρ|`, `rhs = (h + C log|F|/|F|)·Lip(φ)`.
pub fn discrepancy_report(
    f: &AtomicMeasureC,
    height: f64,
    rho: &PotentialMeasureC,
    measure_name: &str,
    phi: &TestFunctionC,
    constant: f64,
    samples: usize,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let n = f.len();
    if n == 0 {
        return Err(Error::InvalidMeasure("empty set".into()));
    }
    let avg = f.integrate(|z| phi.eval(z));
    let (integral, sampling_error) = match phi.exact_integral(measure_name) {
        Some(v) => (v, 0.0),
        None if rho.has_sampler() => {
            let s = rho.sample(samples, seed)?;
            let vals: Vec<f64> = s.finite_points().map(|z| phi.eval(z)).collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64;
            (m, (var / vals.len() as f64).sqrt())
        }
        None => return Err(Error::Unsupported(format!("no integral of {} against {measure_name}", phi.name()))),
    };
    let lhs = (avg - integral).abs();
    let nf = n as f64;
    let rate = if n > 1 { nf.ln() / nf } else { 1.0 };
    let lip = phi.lipschitz_bound();
    Ok(DiscrepancyReport {
        size: n,
        height,
        lhs,
        rhs: (height + constant * rate) * lip,
        lip,
        ratio: lhs / (lip * rate),
        sampling_error,
    })
}
