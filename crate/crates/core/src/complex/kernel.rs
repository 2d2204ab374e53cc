use super::quad::integrate;
use crate::error::Result;

/// Radial smoothing profile `φ(r) = c·exp(−1/(1−r²))` on `[0,1)`, zero beyond.
///
/// Smooth, decreasing, `∫₀¹ φ = 1`. The value `φ(0) = c/e` exceeds 1, so the
/// profile is not bounded by 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingKernel {
    norm: f64,
    c_phi: f64,
    c_self: f64,
}

fn bump(r: f64) -> f64 {
    if r >= 1.0 { 0.0 } else { (-1.0 / (1.0 - r * r)).exp() }
}

impl SmoothingKernel {
    pub fn new() -> Result<Self> {
        let mass = integrate(bump, 0.0, 1.0, &[], 1e-15)?;
        let norm = 1.0 / mass;
        let phi = |r: f64| norm * bump(r);
        let c_phi = -integrate(|r| r.ln() * phi(r), 0.0, 1.0, &[], 1e-13)?;
        // C_self = −∫∫ max(log s, log s′) φ φ = −2 ∫ log s φ(s) Φ(s) ds
        let cdf = |s: f64| integrate(phi, 0.0, s, &[], 1e-14).unwrap_or(f64::NAN);
        let c_self = -2.0 * integrate(|s| s.ln() * phi(s) * cdf(s), 0.0, 1.0, &[], 1e-12)?;
        Ok(SmoothingKernel { norm, c_phi, c_self })
    }

    pub fn profile(&self, r: f64) -> f64 {
        if r < 0.0 { 0.0 } else { self.norm * bump(r) }
    }

    /// `φ_ε(r) = ε⁻¹ φ(r/ε)`.
    pub fn scaled(&self, r: f64, eps: f64) -> f64 {
        self.profile(r / eps) / eps
    }

    /// `C_φ = −∫₀¹ log r φ(r) dr`.
    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    /// Exact self-energy constant: `([z]_ε, [z]_ε) = C_self + log ε⁻¹`, with `C_self ≤ C_φ`.
    pub fn c_self(&self) -> f64 {
        self.c_self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_and_decreasing() {
        let k = SmoothingKernel::new().unwrap();
        let mass = integrate(|r| k.profile(r), 0.0, 1.0, &[], 1e-14).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let v = k.profile(i as f64 / 1000.0);
            assert!(v <= prev);
            prev = v;
        }
        assert_eq!(k.profile(1.0), 0.0);
    }

    #[test]
    fn constants() {
        let k = SmoothingKernel::new().unwrap();
        assert!(k.c_phi().is_finite() && k.c_phi() > 0.0);
        assert!(k.c_self() <= k.c_phi());
        assert!(k.c_self() > 0.0);
        // Scaling: −∫ log r φ_ε = C_φ + log ε⁻¹
        let eps: f64 = 0.01;
        let v = -integrate(|r| r.ln() * k.scaled(r, eps), 0.0, eps, &[], 1e-12).unwrap();
        assert!((v - (k.c_phi() - eps.ln())).abs() < 1e-9);
    }
}
