//! Experiment configuration.
//!
//! A configuration is one JSON document. Values are resolved in three layers,
//! later layers winning: built-in defaults for the kind, the JSON document,
//! then command-line flags.

use std::path::{Path, PathBuf};

use adelic_core::arith::{IntPoly, is_prime, parse_rat};
use adelic_core::dynamics::{PERIODIC_DEGREE_BUDGET, PARAM_DEGREE_BUDGET, ProjPoint, RationalMapQ};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    RootsOfUnity,
    PeriodicPoints,
    Preimages,
    Mandelbrot,
    Basilica,
    BerkovichDemo,
    HeightTable,
    PairingTable,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::RootsOfUnity => "roots_of_unity",
            ExperimentKind::PeriodicPoints => "periodic_points",
            ExperimentKind::Preimages => "preimages",
            ExperimentKind::Mandelbrot => "mandelbrot",
            ExperimentKind::Basilica => "basilica",
            ExperimentKind::BerkovichDemo => "berkovich_demo",
            ExperimentKind::HeightTable => "height_table",
            ExperimentKind::PairingTable => "pairing_table",
        }
    }
}

/// Every tunable of every experiment kind; each kind reads the fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Parameters {
    /// Rational map as `"num|den"` ascending coefficients, e.g. `"-1,0,1"` for z² − 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    /// Places as `"inf"` or a prime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub places: Option<Vec<String>>,
    /// Rational points `"a/b"`, or `"inf"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    /// Integer polynomials in ascending coefficient form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polys: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_functions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

macro_rules! overlay_fields {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Parameters {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: &Parameters) {
        overlay_fields!(
            self, top, map, degree, n_min, n_max, sizes, primes, places, points, polys, base_point,
            test_functions, samples, depth, count, reference_n, constant, seed, tol
        );
    }

    fn defaults(kind: ExperimentKind) -> Parameters {
        let strings = |v: &[&str]| Some(v.iter().map(|s| s.to_string()).collect());
        let mut p = Parameters { seed: Some(0), ..Default::default() };
        match kind {
            ExperimentKind::RootsOfUnity => {
                p.sizes = Some((3..=12).map(|k| 1usize << k).collect());
                p.test_functions = strings(&["re", "exp_re", "bump"]);
                p.constant = Some(1.0);
            }
            ExperimentKind::PeriodicPoints | ExperimentKind::Preimages => {
                p.map = Some("-1,0,1".into());
                p.n_min = Some(2);
                p.n_max = Some(if kind == ExperimentKind::PeriodicPoints { 8 } else { 10 });
                p.test_functions = strings(&["re", "im", "abs2_capped"]);
                p.samples = Some(50_000);
                p.depth = Some(30);
                if kind == ExperimentKind::Preimages {
                    p.base_point = Some("2".into());
                }
            }
            ExperimentKind::Mandelbrot => {
                p.degree = Some(2);
                p.n_min = Some(2);
                p.n_max = Some(10);
                p.reference_n = Some(12);
                p.test_functions = strings(&["re", "im", "abs2_capped"]);
                p.tol = Some(1e-10);
            }
            ExperimentKind::Basilica => {
                p.primes = Some(vec![3]);
                p.n_min = Some(1);
                p.n_max = Some(4);
            }
            ExperimentKind::BerkovichDemo => {
                p.primes = Some(vec![2]);
                p.count = Some(3);
            }
            ExperimentKind::HeightTable => {
                p.points = strings(&["0", "1", "1/2", "-3/2", "7/3"]);
                p.tol = Some(1e-10);
            }
            ExperimentKind::PairingTable => {
                p.polys = strings(&["-2,0,1", "-3,0,1", "1,1,1"]);
                p.places = strings(&["inf", "2", "3"]);
            }
        }
        p
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// File name prefix; defaults to the kind name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub parameters: Parameters,
    /// Output locations are not echoed so that moving a run does not change its files.
    #[serde(default, skip_serializing)]
    pub output: OutputPaths,
    /// Worker threads; output does not depend on it.
    #[serde(default, skip_serializing)]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing)]
    pub verify: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            parameters: Parameters::default(),
            output: OutputPaths::default(),
            jobs: None,
            verify: false,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        Self::from_json(&text)
    }

    /// Fills defaults and checks every parameter the kind uses.
    pub fn resolve(mut self) -> CliResult<Self> {
        let mut p = Parameters::defaults(self.kind);
        p.overlay(&self.parameters);
        self.parameters = p;
        validate(&self)?;
        Ok(self)
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_map(s: &str) -> CliResult<RationalMapQ> {
    RationalMapQ::parse(s).map_err(|e| bad(format!("map {s:?}: {e}")))
}

pub fn parse_point(s: &str) -> CliResult<ProjPoint> {
    if s.trim() == "inf" {
        return Ok(ProjPoint::infinity());
    }
    parse_rat(s).map(|q| ProjPoint::from_rat(&q)).map_err(|e| bad(format!("point {s:?}: {e}")))
}

pub fn parse_poly(s: &str) -> CliResult<IntPoly> {
    IntPoly::parse(s).map_err(|e| bad(format!("polynomial {s:?}: {e}")))
}

pub const TEST_FUNCTIONS: [&str; 5] = ["re", "im", "exp_re", "bump", "abs2_capped"];

fn n_range(p: &Parameters, max: usize) -> CliResult<(usize, usize)> {
    let (lo, hi) = (p.n_min.unwrap_or(1), p.n_max.unwrap_or(1));
    if lo == 0 || lo > hi {
        return Err(bad(format!("need 1 ≤ n_min ≤ n_max, got {lo}..{hi}")));
    }
    if hi > max {
        return Err(bad(format!("n_max = {hi} exceeds the limit {max} for this kind")));
    }
    Ok((lo, hi))
}

fn check_test_functions(p: &Parameters) -> CliResult<()> {
    for f in p.test_functions.iter().flatten() {
        if !TEST_FUNCTIONS.contains(&f.as_str()) {
            return Err(bad(format!("unknown test function {f:?}; known: {}", TEST_FUNCTIONS.join(", "))));
        }
    }
    Ok(())
}

fn check_positive(name: &str, v: Option<f64>) -> CliResult<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(bad(format!("{name} must be positive and finite"))),
        _ => Ok(()),
    }
}

fn validate(c: &ExperimentConfig) -> CliResult<()> {
    let p = &c.parameters;
    check_positive("tol", p.tol)?;
    check_positive("constant", p.constant)?;
    check_test_functions(p)?;
    if c.jobs == Some(0) {
        return Err(bad("jobs must be at least 1"));
    }
    match c.kind {
        ExperimentKind::RootsOfUnity => {
            for &n in p.sizes.iter().flatten() {
                if !(2..=1 << 20).contains(&n) {
                    return Err(bad(format!("size {n} outside 2..=2^20")));
                }
            }
        }
        ExperimentKind::PeriodicPoints | ExperimentKind::Preimages => {
            let r = parse_map(p.map.as_deref().unwrap_or_default())?;
            if r.degree() < 2 {
                return Err(bad("the map must have degree at least 2"));
            }
            let (_, hi) = n_range(p, 64)?;
            let budget = if c.kind == ExperimentKind::PeriodicPoints { PERIODIC_DEGREE_BUDGET } else { 1 << 16 };
            if r.degree().checked_pow(hi as u32).is_none_or(|d| d > budget) {
                return Err(bad(format!("degree {}^{hi} exceeds the budget {budget}", r.degree())));
            }
            if p.samples == Some(0) || p.depth == Some(0) {
                return Err(bad("samples and depth must be positive"));
            }
            if c.kind == ExperimentKind::Preimages {
                let a = parse_point(p.base_point.as_deref().unwrap_or_default())?;
                if a.is_infinity() {
                    return Err(bad("base point ∞ is exceptional"));
                }
            }
        }
        ExperimentKind::Mandelbrot => {
            let d = p.degree.unwrap_or(2);
            if d < 2 {
                return Err(bad("degree must be at least 2"));
            }
            let (_, hi) = n_range(p, 64)?;
            let refn = p.reference_n.unwrap_or(hi);
            if refn < hi {
                return Err(bad("reference_n must be at least n_max"));
            }
            if d.checked_pow(refn as u32 - 1).is_none_or(|k| k > PARAM_DEGREE_BUDGET) {
                return Err(bad(format!("parameter degree {d}^{} exceeds {PARAM_DEGREE_BUDGET}", refn - 1)));
            }
        }
        ExperimentKind::Basilica => {
            n_range(p, 5)?;
            for &q in p.primes.iter().flatten() {
                if q == 2 || !is_prime(q) {
                    return Err(bad(format!("{q} is not an odd prime")));
                }
            }
        }
        ExperimentKind::BerkovichDemo => {
            for &q in p.primes.iter().flatten() {
                if !is_prime(q) {
                    return Err(bad(format!("{q} is not a prime")));
                }
            }
            if !(2..=12).contains(&p.count.unwrap_or(0)) {
                return Err(bad("count must lie in 2..=12"));
            }
        }
        ExperimentKind::HeightTable => {
            if let Some(m) = &p.map {
                parse_map(m)?;
            }
            for s in p.points.iter().flatten() {
                parse_point(s)?;
            }
            for s in p.polys.iter().flatten() {
                let f = parse_poly(s)?;
                if f.degree() == 0 {
                    return Err(bad(format!("polynomial {s:?} is constant")));
                }
            }
        }
        ExperimentKind::PairingTable => {
            for s in p.polys.iter().flatten() {
                let f = parse_poly(s)?;
                if f.degree() == 0 {
                    return Err(bad(format!("polynomial {s:?} is constant")));
                }
            }
            for s in p.places.iter().flatten() {
                parse_place(s)?;
            }
        }
    }
    Ok(())
}

pub fn parse_place(s: &str) -> CliResult<adelic_core::heights::Place> {
    s.parse().map_err(|e| bad(format!("place {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_then_document_then_flags() {
        let mut c = ExperimentConfig::from_json(r#"{"kind":"basilica","parameters":{"n_max":3}}"#).unwrap();
        let flags = Parameters { primes: Some(vec![5, 7]), ..Default::default() };
        c.parameters.overlay(&flags);
        let c = c.resolve().unwrap();
        assert_eq!(c.parameters.n_min, Some(1));
        assert_eq!(c.parameters.n_max, Some(3));
        assert_eq!(c.parameters.primes, Some(vec![5, 7]));
    }

    #[test]
    fn rejects_bad_parameters() {
        let cases = [
            r#"{"kind":"basilica","parameters":{"primes":[2]}}"#,
            r#"{"kind":"basilica","parameters":{"n_max":6}}"#,
            r#"{"kind":"periodic_points","parameters":{"map":"1"}}"#,
            r#"{"kind":"periodic_points","parameters":{"n_max":20}}"#,
            r#"{"kind":"mandelbrot","parameters":{"reference_n":15}}"#,
            r#"{"kind":"roots_of_unity","parameters":{"test_functions":["sin"]}}"#,
            r#"{"kind":"roots_of_unity","parameters":{"sizes":[1]}}"#,
            r#"{"kind":"preimages","parameters":{"base_point":"inf"}}"#,
            r#"{"kind":"berkovich_demo","parameters":{"count":1}}"#,
            r#"{"kind":"pairing_table","parameters":{"places":["4"]}}"#,
        ];
        for text in cases {
            let c = ExperimentConfig::from_json(text).unwrap();
            assert!(c.resolve().is_err(), "{text}");
        }
        assert!(ExperimentConfig::from_json(r#"{"kind":"basilica","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"nope"}"#).is_err());
    }
}
