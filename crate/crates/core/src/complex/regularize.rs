//! Energies of measures smoothed by radial convolution `[z] ↦ [z]_ε`.

use num_complex::Complex64;

use super::kernel::SmoothingKernel;
use super::measure::{AtomicMeasureC, PointC, PotentialMeasureC, energy_atomic, ordered_sum};
use super::quad::integrate;
use crate::arith::integer::rat_to_f64;
use crate::error::{Error, Result};

/// `ζ(2), ζ(4), …, ζ(60)`.
fn zeta_even() -> &'static [f64; 30] {
    static TABLE: std::sync::OnceLock<[f64; 30]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 30];
        for (k, z) in out.iter_mut().enumerate() {
            let e = -2.0 * (k + 1) as f64;
            // tail beyond n = 40 is below 1e-19 once the exponent reaches 12
            *z = (1..=40).rev().map(|n| (n as f64).powf(e)).sum();
            if k < 5 {
                *z = [
                    std::f64::consts::PI.powi(2) / 6.0,
                    std::f64::consts::PI.powi(4) / 90.0,
                    std::f64::consts::PI.powi(6) / 945.0,
                    std::f64::consts::PI.powi(8) / 9450.0,
                    std::f64::consts::PI.powi(10) / 93555.0,
                ][k];
            }
        }
        out
    })
}

/// Clausen function `Cl₂(θ) = Σ sin(kθ)/k²`.
pub(crate) fn clausen2(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta.rem_euclid(TAU);
    let mut sign = 1.0;
    if t > PI {
        t = TAU - t;
        sign = -1.0;
    }
    if t == 0.0 {
        return 0.0;
    }
    // Cl₂(t) = t − t log t + Σ_k 2ζ(2k) t^{2k+1} / ((2π)^{2k} 2k (2k+1))
    let mut acc = t - t * t.ln();
    let x = (t / TAU) * (t / TAU);
    let mut pow = t * x;
    for (k, zeta) in zeta_even().iter().enumerate() {
        let kk = 2.0 * (k + 1) as f64;
        let term = 2.0 * zeta * pow / (kk * (kk + 1.0));
        acc += term;
        if term.abs() < 1e-17 * acc.abs() {
            break;
        }
        pow *= x;
    }
    sign * acc
}

/// `Im Li₂(a e^{iθ})` for `0 ≤ a ≤ 1`.
pub(crate) fn im_dilog(a: f64, theta: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let omega = (a * theta.sin()).atan2(1.0 - a * theta.cos());
    omega * a.ln() + 0.5 * (clausen2(2.0 * theta) + clausen2(2.0 * omega) - clausen2(2.0 * omega + 2.0 * theta))
}

/// Circle average of `max(log|δ − s′e^{it}|, log s)` over `t`.
fn circle_max_average(s: f64, s2: f64, delta: f64) -> f64 {
    use std::f64::consts::PI;
    let far = delta.max(s2);
    if s == 0.0 || s2 == 0.0 {
        return if s == 0.0 { far.ln() } else { delta.max(s).ln() };
    }
    let ls = s.ln();
    if delta + s2 <= s {
        return ls;
    }
    if (delta - s2).abs() >= s {
        return far.ln();
    }
    let cos_t0 = ((delta * delta + s2 * s2 - s * s) / (2.0 * delta * s2)).clamp(-1.0, 1.0);
    let t0 = cos_t0.acos();
    // ∫₀^θ log|M − m e^{it}| dt = θ log M − Im Li₂((m/M) e^{iθ}), and the full
    // half-period integral is π log M.
    let ratio = delta.min(s2) / far;
    let head = t0 * far.ln() - im_dilog(ratio, t0);
    let tail = PI * far.ln() - head;
    (t0 * ls + tail) / PI
}

/// `R(δ) = −∬ B(s,s′;δ) φ(s) φ(s′)` so that `([z]_ε,[z′]_ε) = log ε⁻¹ + R(|z−z′|/ε)`.
fn normalized_pair(delta: f64, k: &SmoothingKernel, tol: f64) -> Result<f64> {
    let inner_tol = tol * 1e-1;
    let outer = |s: f64| -> f64 {
        let breaks = [(delta - s).abs(), delta + s, delta];
        let v = integrate(
            |s2| circle_max_average(s, s2, delta) * k.profile(s2),
            0.0,
            1.0,
            &breaks,
            inner_tol,
        );
        v.unwrap_or(f64::NAN) * k.profile(s)
    };
    let v = integrate(outer, 0.0, 1.0, &[delta, delta / 2.0], tol)?;
    if v.is_nan() {
        return Err(Error::Quadrature(tol));
    }
    Ok(-v)
}

/// `([z]_ε, [z′]_ε)`.
///
/// Equals `−log|z−z′|` once `|z−z′| ≥ 2ε`, and `C_self + log ε⁻¹` for `z = z′`.
pub fn regularized_pair(z: Complex64, z2: Complex64, eps: f64, k: &SmoothingKernel, tol: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidMeasure(format!("smoothing radius {eps} must be positive")));
    }
    let d = (z - z2).norm();
    if d >= 2.0 * eps {
        return Ok(-d.ln());
    }
    if d == 0.0 {
        return Ok(k.c_self() - eps.ln());
    }
    Ok(normalized_pair(d / eps, k, tol)? - eps.ln())
}

/// `(ρ_ε, ρ′_ε)` for atomic measures.
pub fn energy_regularized(
    f: &AtomicMeasureC,
    g: &AtomicMeasureC,
    eps: f64,
    k: &SmoothingKernel,
    tol: f64,
) -> Result<f64> {
    let n = (f.len() * g.len()).max(1) as f64;
    let mut terms = Vec::new();
    for (z, w) in f.atoms() {
        let PointC::Finite(z) = z else { continue };
        for (z2, w2) in g.atoms() {
            let PointC::Finite(z2) = z2 else { continue };
            let v = regularized_pair(*z, *z2, eps, k, tol / n)?;
            terms.push(rat_to_f64(w) * rat_to_f64(w2) * v);
        }
    }
    Ok(ordered_sum(terms))
}

/// `([F]_ε, [F]_ε)`.
pub fn energy_regularized_set(f: &AtomicMeasureC, eps: f64, k: &SmoothingKernel, tol: f64) -> Result<f64> {
    energy_regularized(f, f, eps, k, tol)
}

/// Both sides of `([F]_ε,[F]_ε) ≤ ([F],[F]) + |F|⁻¹(C_φ + log ε⁻¹)` for uniform `[F]`.
pub fn l120_check(f: &AtomicMeasureC, eps: f64, k: &SmoothingKernel, tol: f64) -> Result<(f64, f64)> {
    let lhs = energy_regularized_set(f, f_eps_guard(eps)?, k, tol)?;
    let n = f.finite_points().count() as f64;
    let rhs = energy_atomic(f, f).value + (k.c_phi() - eps.ln()) / n;
    Ok((lhs, rhs))
}

fn f_eps_guard(eps: f64) -> Result<f64> {
    if eps > 0.0 { Ok(eps) } else { Err(Error::InvalidMeasure("ε must be positive".into())) }
}

/// `([F]_ε, ρ) = −Σ w_α ∫₀^ε [mean_t g_ρ(α + r e^{it})] φ_ε(r) dr`.
pub fn pairing_regularized_vs_measure(
    f: &AtomicMeasureC,
    rho: &PotentialMeasureC,
    eps: f64,
    k: &SmoothingKernel,
    tol: f64,
) -> Result<f64> {
    f_eps_guard(eps)?;
    let mut terms = Vec::new();
    for (z, w) in f.atoms() {
        let PointC::Finite(z) = z else { continue };
        let mut failed = None;
        let v = integrate(
            |s| {
                let r = eps * s;
                let mean = integrate(
                    |t| rho.potential(z + Complex64::from_polar(r, t)),
                    0.0,
                    std::f64::consts::TAU,
                    &[],
                    tol * 1e-1,
                );
                match mean {
                    Ok(m) => m / std::f64::consts::TAU * k.profile(s),
                    Err(e) => {
                        failed = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            &[],
            tol,
        )?;
        if let Some(e) = failed {
            return Err(e);
        }
        terms.push(-rat_to_f64(w) * v);
    }
    Ok(ordered_sum(terms))
}

/// One side of a signed measure: a smoothed atomic measure or a measure with potential.
#[derive(Debug, Clone, Copy)]
pub enum Component<'a> {
    Smoothed { atoms: &'a AtomicMeasureC, eps: f64 },
    Potential(&'a PotentialMeasureC),
}

/// Samples used for `(ρ, ρ′)` between two different potential measures.
pub const CROSS_SAMPLES: usize = 4096;

fn pair(a: &Component, b: &Component, k: &SmoothingKernel, tol: f64, seed: u64) -> Result<f64> {
    use Component::*;
    match (a, b) {
        (Smoothed { atoms: f, eps: e1 }, Smoothed { atoms: g, eps: e2 }) => {
            if e1 != e2 {
                return Err(Error::Unsupported("different smoothing radii".into()));
            }
            energy_regularized(f, g, *e1, k, tol)
        }
        (Smoothed { atoms, eps }, Potential(rho)) | (Potential(rho), Smoothed { atoms, eps }) => {
            pairing_regularized_vs_measure(atoms, rho, *eps, k, tol)
        }
        (Potential(r1), Potential(r2)) => r1.pairing(r2, CROSS_SAMPLES, seed),
    }
}

/// `(a − b, a − b)` for two probability components.
pub fn positivity_check(a: &Component, b: &Component, k: &SmoothingKernel, tol: f64) -> Result<f64> {
    let aa = pair(a, a, k, tol, 1)?;
    let ab = pair(a, b, k, tol, 2)?;
    let bb = pair(b, b, k, tol, 3)?;
    Ok(aa - 2.0 * ab + bb)
}

/// Both sides of `([F]−ρ,[F]−ρ) ≥ ([F]_ε−ρ,[F]_ε−ρ) − 2η − |F|⁻¹(C + log ε⁻¹)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P130Report {
    pub lhs: f64,
    pub smoothed_energy: f64,
    pub eta: f64,
    pub constant: f64,
    pub rhs_smoothed: f64,
    pub rhs_bound: f64,
    pub slack: f64,
}

pub fn p130_gap(
    f: &AtomicMeasureC,
    rho: &PotentialMeasureC,
    eps: f64,
    eta: f64,
    k: &SmoothingKernel,
    tol: f64,
) -> Result<P130Report> {
    let rr = rho
        .self_energy()
        .ok_or_else(|| Error::Unsupported("measure energy unknown".into()))?;
    let n = f.finite_points().count() as f64;
    let lhs = energy_atomic(f, f).value - 2.0 * rho.pairing_atomic(f) + rr;
    let smoothed_energy =
        energy_regularized_set(f, eps, k, tol)? - 2.0 * pairing_regularized_vs_measure(f, rho, eps, k, tol)? + rr;
    let penalty = 2.0 * eta + (k.c_phi() - eps.ln()) / n;
    let rhs_smoothed = smoothed_energy - penalty;
    Ok(P130Report {
        lhs,
        smoothed_energy,
        eta,
        constant: k.c_phi(),
        rhs_smoothed,
        rhs_bound: -penalty,
        slack: lhs - rhs_smoothed,
    })
}
