use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::pairing::{
    ARCH_TOL, LocalMeasure, LocalPairing, integral_log_monic, pairing_finite_sets, pairing_set_vs_measure,
    sum_log_plus,
};
use super::place::Place;
use super::set::{AlgebraicSet, ROOT_TOL};
use crate::arith::integer::{BigRat, factor_integer, ln_abs_bigint, parse_rat, rat_to_f64};
use crate::arith::resultant::ordered_root_difference_product;
use crate::arith::roots::mahler_measure;
use crate::berkovich::{AtomicMeasureB, BerkPoint, ExtRat, wedge};
use crate::complex::measure::ordered_sum;
use crate::error::{Error, Result};

/// A family `{ρ_v}` equal to `λ_v` outside a finite set of places.
#[derive(Debug, Clone, Default)]
pub struct AdelicMeasure {
    exceptional: BTreeMap<Place, LocalMeasure>,
}

impl AdelicMeasure {
    /// `{λ_v}`, whose height is the naive height.
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn with_place(mut self, rho: LocalMeasure) -> Result<Self> {
        rho.validate()?;
        if rho.is_lambda() {
            self.exceptional.remove(&rho.place());
        } else {
            self.exceptional.insert(rho.place(), rho);
        }
        Ok(self)
    }

    pub fn exceptional_places(&self) -> impl Iterator<Item = &Place> {
        self.exceptional.keys()
    }

    pub fn measure_at(&self, v: Place) -> LocalMeasure {
        self.exceptional.get(&v).cloned().unwrap_or_else(|| LocalMeasure::lambda(v))
    }

    /// Exceptional places together with ∞.
    fn explicit_places(&self) -> BTreeSet<Place> {
        let mut s: BTreeSet<Place> = self.exceptional.keys().copied().collect();
        s.insert(Place::Archimedean);
        s
    }

    /// `h_ρ(∞) = ½ Σ_v (ρ_v, ρ_v)_v`.
    pub fn height_at_infinity(&self) -> Result<f64> {
        let terms = self
            .exceptional
            .values()
            .map(|m| m.self_energy().map(|e| e.to_f64()))
            .collect::<Result<Vec<_>>>()?;
        Ok(0.5 * ordered_sum(terms))
    }

    /// Parses `[{"place": "inf"|"p", "measure_kind": ..., "parameters": {...}}]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let specs: Vec<LocalMeasureSpec> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("adelic measure: {e}")))?;
        let mut out = Self::standard();
        for spec in specs {
            out = out.with_place(spec.resolve()?)?;
        }
        Ok(out)
    }
}

/// JSON form of one local component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalMeasureSpec {
    pub place: Place,
    pub measure_kind: String,
    #[serde(default)]
    pub parameters: Value,
}

impl LocalMeasureSpec {
    pub fn resolve(&self) -> Result<LocalMeasure> {
        match self.measure_kind.as_str() {
            "lambda" => Ok(LocalMeasure::lambda(self.place)),
            "equilibrium" => {
                let map = self
                    .parameters
                    .get("map")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("equilibrium needs parameters.map".into()))?;
                let r = crate::dynamics::RationalMapQ::parse(map)?;
                crate::dynamics::equilibrium_local_measure(&r, self.place)
            }
            "explicit_atomic" => {
                let Place::Finite(p) = self.place else {
                    return Err(Error::Unsupported("explicit atomic measures are finite-place only".into()));
                };
                let atoms = self
                    .parameters
                    .get("atoms")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("explicit_atomic needs parameters.atoms".into()))?;
                let mut m = AtomicMeasureB::zero(p);
                for a in atoms {
                    let field = |k: &str| -> Result<BigRat> {
                        let s = a
                            .get(k)
                            .map(|v| match v {
                                Value::String(s) => s.clone(),
                                other => other.to_string(),
                            })
                            .ok_or_else(|| Error::Parse(format!("atom missing {k}")))?;
                        parse_rat(&s)
                    };
                    m.add_atom(BerkPoint::ball(p, field("center")?, field("logr")?)?, field("weight")?)?;
                }
                Ok(LocalMeasure::Finite(m))
            }
            other => Err(Error::Parse(format!("unknown measure kind {other:?}"))),
        }
    }
}

/// `h_nv(F)` by the double sum over places: archimedean terms from the
/// cached roots, finite terms from Newton polygons at primes dividing `lc`.
pub fn naive_height(f: &AlgebraicSet) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::InvalidMeasure("empty set".into()));
    }
    let mut terms: Vec<f64> = f.roots()?.iter().map(|r| r.abs().ln().max(0.0)).collect();
    if f.finite_len() > 0 {
        for (p, _) in factor_integer(&f.min_poly().lc())? {
            let p = p.to_u64().ok_or_else(|| Error::Unsupported("prime exceeds 64 bits".into()))?;
            terms.push(rat_to_f64(&sum_log_plus(f, p)) * (p as f64).ln());
        }
    }
    Ok(ordered_sum(terms) / f.len() as f64)
}

/// `(1/deg) log M(P)`.
pub fn naive_height_mahler(f: &AlgebraicSet) -> Result<f64> {
    if f.contains_infinity() {
        return Err(Error::InvalidPoint("∞ is not a root of a polynomial".into()));
    }
    Ok(mahler_measure(f.min_poly(), ROOT_TOL)? / f.finite_len() as f64)
}

/// `Σ_{p ∉ S} v_p(lc) log p` for a finite set `S` of places.
fn generic_lc_term(f: &AlgebraicSet, explicit: &BTreeSet<Place>) -> f64 {
    if f.finite_len() == 0 {
        return 0.0;
    }
    let lc = f.min_poly().lc();
    let mut terms = vec![ln_abs_bigint(&lc)];
    for v in explicit {
        if let Place::Finite(p) = v {
            let e = crate::arith::integer::int_valuation(&lc, *p);
            terms.push(-(e as f64) * (*p as f64).ln());
        }
    }
    ordered_sum(terms)
}

/// `h_ρ(F) = ½ Σ_v ((F − ρ_v, F − ρ_v))_v`.
///
/// Places outside `E = {∞} ∪ {exceptional}` are summed in closed form: by the
/// product formula their `([F],[F])_v` add up to `−Σ_{v∈E} ([F],[F])_v`, and
/// `Σ_{p∉E} −2(λ_p,[F])_p = (2/|F|) Σ_{p∉E} v_p(lc) log p`.
pub fn adelic_height(f: &AlgebraicSet, rho: &AdelicMeasure) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::InvalidMeasure("empty set".into()));
    }
    let explicit = rho.explicit_places();
    let mut terms = vec![rho.height_at_infinity()?];
    for v in &explicit {
        terms.push(-pairing_set_vs_measure(f, &rho.measure_at(*v), *v)?.to_f64());
    }
    terms.push(generic_lc_term(f, &explicit) / f.len() as f64);
    Ok(ordered_sum(terms))
}

/// One local term `½ ((F − ρ_v, F − ρ_v))_v`.
pub fn local_height_term(f: &AlgebraicSet, rho: &LocalMeasure) -> Result<LocalPairing> {
    let v = rho.place();
    let own = pairing_finite_sets(f, f, v)?;
    let cross = pairing_set_vs_measure(f, rho, v)?;
    let rr = rho.self_energy()?;
    Ok(match (own.as_exact(), cross.as_exact(), rr.as_exact()) {
        (Some(a), Some(b), Some(c)) => {
            let two = BigRat::from_integer(2.into());
            LocalPairing::exact(a.prime, (&a.coeff - &two * &b.coeff + &c.coeff) / two)
        }
        _ => LocalPairing::numeric(
            0.5 * (own.to_f64() - 2.0 * cross.to_f64() + rr.to_f64()),
            own.tol() + 2.0 * cross.tol() + rr.tol(),
        ),
    })
}

/// Every place with a nonzero term of `h_ρ(F)`, found by factoring `lc(P)`
/// and `Δ_F`. Fails when a factor is out of reach.
pub fn adelic_height_by_places(f: &AlgebraicSet, rho: &AdelicMeasure) -> Result<Vec<LocalPairing>> {
    let mut places = rho.explicit_places();
    if f.finite_len() > 0 {
        let delta = ordered_root_difference_product(f.min_poly())?;
        for n in [f.min_poly().lc(), delta.numer().clone(), delta.denom().clone()] {
            for (p, _) in factor_integer(&n)? {
                let p = p.to_u64().ok_or_else(|| Error::Unsupported("prime exceeds 64 bits".into()))?;
                places.insert(Place::Finite(p));
            }
        }
    }
    places.into_iter().map(|v| local_height_term(f, &rho.measure_at(v))).collect()
}

/// Mahler-type formula `h_ρ(∞) + (1/deg) Σ_v ∫ log|P|_v dρ_v` for monic `P`.
pub fn mahler_formula_general(f: &AlgebraicSet, rho: &AdelicMeasure) -> Result<f64> {
    if f.contains_infinity() {
        return Err(Error::InvalidPoint("∞ ∈ F".into()));
    }
    let explicit = rho.explicit_places();
    let mut terms = Vec::new();
    for v in &explicit {
        terms.push(integral_log_monic(f, &rho.measure_at(*v))?.to_f64());
    }
    // At λ_p the integral is the log Gauss norm of the monic polynomial.
    terms.push(generic_lc_term(f, &explicit));
    Ok(rho.height_at_infinity()? + ordered_sum(terms) / f.finite_len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeilComparison {
    pub max_difference: f64,
    pub bound: f64,
}

/// Largest `|g_{ρ_v} − g_{λ_v}|`: over a log-polar grid at ∞, over the
/// vertices of the spanned tree at a finite place (where it is attained).
pub fn potential_difference_sup(rho: &LocalMeasure) -> Result<f64> {
    match rho {
        LocalMeasure::Archimedean(m) => {
            let mut best: f64 = 0.0;
            for i in 0..=240 {
                let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 240.0);
                for j in 0..128 {
                    let z = Complex64::from_polar(r, std::f64::consts::TAU * (j as f64 + 0.5 * (i % 2) as f64) / 128.0);
                    let d = m.potential(z) - z.norm().ln().max(0.0);
                    if !d.is_finite() {
                        return Ok(f64::INFINITY);
                    }
                    best = best.max(d.abs());
                }
            }
            Ok(best)
        }
        LocalMeasure::Finite(m) => {
            let p = m.prime();
            let gauss = BerkPoint::gauss(p)?;
            let lam = AtomicMeasureB::dirac(gauss.clone());
            let mut pts: Vec<BerkPoint> = m.atoms().iter().map(|(s, _)| s.clone()).collect();
            pts.push(gauss);
            let n = pts.len();
            for i in 0..n {
                for j in i + 1..n {
                    let w = wedge(&pts[i], &pts[j])?;
                    if !pts.contains(&w) {
                        pts.push(w);
                    }
                }
            }
            let mut best = BigRat::zero();
            for s in &pts {
                let (ExtRat::Finite(a), ExtRat::Finite(b)) = (m.potential(s)?, lam.potential(s)?) else {
                    return Ok(f64::INFINITY);
                };
                let d = num_traits::Signed::abs(&(a - b));
                if d > best {
                    best = d;
                }
            }
            Ok(rat_to_f64(&best) * (p as f64).ln())
        }
    }
}

/// `max_F |h_ρ(F) − h_nv(F)|` and the bound `|h_ρ(∞)| + Σ_v sup|g_v|`.
pub fn weil_comparison_bound(rho: &AdelicMeasure, sample: &[AlgebraicSet]) -> Result<WeilComparison> {
    if sample.is_empty() {
        return Err(Error::InvalidMeasure("empty sample".into()));
    }
    let mut max_difference: f64 = 0.0;
    for f in sample {
        max_difference = max_difference.max((adelic_height(f, rho)? - naive_height(f)?).abs());
    }
    let mut bound = rho.height_at_infinity()?.abs();
    for m in rho.exceptional.values() {
        bound += potential_difference_sup(m)?;
    }
    Ok(WeilComparison { max_difference, bound: bound + ARCH_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::{rat, rat_int};
    use crate::arith::poly::IntPoly;

    fn set(c: &[i64]) -> AlgebraicSet {
        AlgebraicSet::from_poly(&IntPoly::from_i64(c)).unwrap()
    }

    #[test]
    fn naive_examples() {
        let half = AlgebraicSet::rational(&rat(1, 2));
        assert!((naive_height(&half).unwrap() - 2f64.ln()).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let g = set(&[-1, -1, 1]);
        assert!((naive_height(&g).unwrap() - 0.5 * phi.ln()).abs() < 1e-12);
        assert!((naive_height_mahler(&g).unwrap() - 0.240_605_912_529_802_2).abs() < 1e-12);
        assert!(naive_height(&AlgebraicSet::roots_of_unity(12).unwrap()).unwrap().abs() < 1e-12);
        assert!((naive_height_mahler(&set(&[-1, 2])).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(naive_height(&AlgebraicSet::infinity()).unwrap(), 0.0);
    }

    #[test]
    fn standard_measure_gives_naive_height() {
        let rho = AdelicMeasure::standard();
        for c in [vec![-1, 2], vec![-1, -1, 1], vec![3, 1, 0, 5], vec![1, -3, 9], vec![-7, 0, 0, 0, 4]] {
            let f = set(&c);
            let h = adelic_height(&f, &rho).unwrap();
            assert!((h - naive_height(&f).unwrap()).abs() < 1e-10, "{c:?}");
            let by_places: f64 = adelic_height_by_places(&f, &rho).unwrap().iter().map(|t| t.to_f64()).sum();
            assert!((h - by_places).abs() < 1e-10, "{c:?}");
            assert!((mahler_formula_general(&f, &rho).unwrap() - h).abs() < 1e-10);
        }
        let u = AlgebraicSet::roots_of_unity(9).unwrap();
        assert!(adelic_height(&u, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn exceptional_finite_place() {
        // ρ_3 = ½[B(0, −1)] + ½[B(1/3, 1)]
        let m = AtomicMeasureB::new(
            3,
            vec![
                (BerkPoint::ball(3, rat_int(0), rat_int(-1)).unwrap(), rat(1, 2)),
                (BerkPoint::ball(3, rat(1, 3), rat_int(1)).unwrap(), rat(1, 2)),
            ],
        )
        .unwrap();
        let rho = AdelicMeasure::standard().with_place(LocalMeasure::Finite(m.clone())).unwrap();
        for c in [vec![-1, 3], vec![-1, -1, 1], vec![1, -3, 9], vec![2, 0, 0, 7]] {
            let f = set(&c);
            let h = adelic_height(&f, &rho).unwrap();
            let by_places: f64 = adelic_height_by_places(&f, &rho).unwrap().iter().map(|t| t.to_f64()).sum();
            assert!((h - by_places).abs() < 1e-10, "{c:?}");
            assert!((mahler_formula_general(&f, &rho).unwrap() - h).abs() < 1e-10, "{c:?}");
        }
        let sample: Vec<AlgebraicSet> = (1..8).map(|k| AlgebraicSet::rational(&rat(k, 3))).collect();
        let w = weil_comparison_bound(&rho, &sample).unwrap();
        assert!(w.max_difference <= w.bound);
        assert!(AdelicMeasure::standard().with_place(LocalMeasure::Finite(m.scale(&rat_int(2)))).is_err());
    }

    #[test]
    fn json_measure() {
        let text = r#"[{"place": "5", "measure_kind": "explicit_atomic",
            "parameters": {"atoms": [{"center": "0", "logr": "1", "weight": "1"}]}},
            {"place": "inf", "measure_kind": "lambda"}]"#;
        let rho = AdelicMeasure::from_json(text).unwrap();
        assert_eq!(rho.exceptional_places().collect::<Vec<_>>(), vec![&Place::Finite(5)]);
        // a single Dirac at B(0,1): (ρ,ρ) = −log 5, h(∞) = −½ log 5
        assert!((rho.height_at_infinity().unwrap() + 0.5 * 5f64.ln()).abs() < 1e-15);
        assert!(AdelicMeasure::from_json(r#"[{"place": "4", "measure_kind": "lambda"}]"#).is_err());
    }

    #[test]
    fn infinity_in_set() {
        let rho = AdelicMeasure::standard();
        let f = AlgebraicSet::new(&IntPoly::from_i64(&[-2, 1]), true).unwrap();
        // |F| = 2 and only the point 2 contributes
        assert!((adelic_height(&f, &rho).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((naive_height(&f).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(mahler_formula_general(&f, &rho).is_err());
    }
}
