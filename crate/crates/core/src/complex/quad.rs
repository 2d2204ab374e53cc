//! Adaptive Gauss–Kronrod (7/15) and periodic trapezoid quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `∫_a^b f` to absolute tolerance `tol`, splitting first at `breaks`.
///
/// Globally adaptive: the interval with the largest error estimate is
/// bisected until the summed estimate drops below `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|x| *x > a && *x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // (error, value, a, b)
    let mut parts: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = kronrod(&mut f, w[0], w[1]);
            (e, v, w[0], w[1])
        })
        .collect();
    loop {
        let err: f64 = parts.iter().map(|p| p.0).sum();
        if !err.is_finite() {
            return Err(Error::Quadrature(err));
        }
        if err <= tol {
            return Ok(parts.iter().map(|p| p.1).sum());
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(err));
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.0.total_cmp(&y.1.0))
            .unwrap();
        let (_, _, lo, hi) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval exhausted in floating point; accept its estimate.
            let (v, _) = kronrod(&mut f, lo, hi);
            parts.push((0.0, v, lo, hi));
            continue;
        }
        for (x, y) in [(lo, mid), (mid, hi)] {
            let (v, e) = kronrod(&mut f, x, y);
            parts.push((e, v, x, y));
        }
    }
}

/// Mean of a `2π`-periodic function by the trapezoid rule, doubling the
/// number of nodes until successive estimates agree to `tol`.
pub fn periodic_mean<F: FnMut(f64) -> f64>(mut f: F, tol: f64, max_nodes: usize) -> Result<f64> {
    let mut n = 16;
    let mut sum: f64 = (0..n).map(|k| f(std::f64::consts::TAU * k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    while n < max_nodes {
        // Reuse previous nodes; only the midpoints are new.
        let add: f64 = (0..n)
            .map(|k| f(std::f64::consts::TAU * (k as f64 + 0.5) / n as f64))
            .sum();
        sum += add;
        n *= 2;
        let cur = sum / n as f64;
        if (cur - prev).abs() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(tol))
}
