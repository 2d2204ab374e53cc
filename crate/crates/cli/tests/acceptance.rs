//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p adelic-cli --test acceptance`. The process exits
//! nonzero only when a criterion outside `KNOWN_FAILURES` fails.

use std::io::Write;
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::time::{Duration, Instant};

use adelic_cli::{Cell, ExperimentConfig, ExperimentReport, run};
use adelic_core::arith::{BigRat, IntPoly, rat, rat_int};
use adelic_core::berkovich::{
    AtomicMeasureB, BerkPoint, FiniteTree, TreeFunction, Truncation, cauchy_schwarz_check, energy_atomic_b,
    energy_flux, hyperbolic_distance, l320_check,
};
use adelic_core::complex::{AtomicMeasureC, PointC, l120_check, standard_kernel};
use adelic_core::dynamics::green::canonical_height_point_tol;
use adelic_core::dynamics::{ProjPoint, RationalMapQ, critical_root_mean};
use adelic_core::heights::{
    AlgebraicSet, LocalMeasure, Place, local_height_term, naive_height, naive_height_mahler, product_formula_residual,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Criteria allowed to fail; see the README.
const KNOWN_FAILURES: &[usize] = &[];

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xac_ce_97 + criterion)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() <= limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_squarefree(r: &mut ChaCha8Rng, max_degree: usize, max_coeff: i64) -> AlgebraicSet {
    loop {
        let d = r.gen_range(1..=max_degree);
        let mut c: Vec<i64> = (0..=d).map(|_| r.gen_range(-max_coeff..=max_coeff)).collect();
        if c[d] == 0 {
            c[d] = 1;
        }
        if let Ok(f) = AlgebraicSet::from_poly(&IntPoly::from_i64(&c)) {
            return f;
        }
    }
}

fn random_ball(r: &mut ChaCha8Rng, p: u64) -> BerkPoint {
    let den = r.gen_range(1..=3);
    let center = rat(r.gen_range(-40..=40), (p as i64).pow(r.gen_range(0..3)));
    let logr = rat(r.gen_range(-4 * den..=4 * den), den);
    BerkPoint::ball(p, center, logr).unwrap()
}

fn distinct_balls(r: &mut ChaCha8Rng, p: u64, count: usize) -> Vec<BerkPoint> {
    let mut out: Vec<BerkPoint> = Vec::new();
    while out.len() < count {
        let b = random_ball(r, p);
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// Nonzero integer weights summing to zero.
fn zero_mass_weights(r: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    loop {
        let mut w: Vec<i64> = (0..n - 1).map(|_| r.gen_range(-3..=3)).collect();
        w.push(-w.iter().sum::<i64>());
        if w.iter().any(|&x| x != 0) {
            return w;
        }
    }
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn c1() -> Outcome {
    let mut r = rng(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.gen_range(1..=1_000_000_000i64) * if r.gen_bool(0.5) { 1 } else { -1 };
        let d = r.gen_range(1..=1_000_000_000i64);
        worst = worst.max(product_formula_residual(&rat(n, d)).map_err(err)?.abs());
    }
    within(start.elapsed(), 5.0)?;
    check(worst <= 1e-10, format!("max residual {worst:.2e} over 1000 rationals"))
}

fn c2() -> Outcome {
    let mut r = rng(2);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let f = random_squarefree(&mut r, 12, 20);
        let diff = naive_height(&f).map_err(err)? - naive_height_mahler(&f).map_err(err)?;
        worst = worst.max(diff.abs());
    }
    within(start.elapsed(), 60.0)?;
    check(worst <= 1e-8, format!("max |naive - mahler| {worst:.2e} over 200 sets"))
}

fn c3() -> Outcome {
    let mut r = rng(3);
    let mut min = None::<BigRat>;
    for _ in 0..200 {
        let f = random_squarefree(&mut r, 8, 20);
        for p in PRIMES {
            let t = local_height_term(&f, &LocalMeasure::lambda(Place::Finite(p))).map_err(err)?;
            let coeff = t.as_exact().ok_or("finite-place term was not exact")?.coeff.clone();
            if min.as_ref().is_none_or(|m| coeff < *m) {
                min = Some(coeff);
            }
        }
    }
    let min = min.unwrap();
    check(min >= rat_int(0), format!("smallest exact coefficient {min} over 1000 terms"))
}

fn c4() -> Outcome {
    let mut r = rng(4);
    let mut types = [0usize; 2];
    for k in 0..500 {
        let p = PRIMES[k % PRIMES.len()];
        let n = r.gen_range(2..=6);
        let balls = distinct_balls(&mut r, p, n);
        for b in &balls {
            types[usize::from(b.diam().finite().unwrap().is_integer())] += 1;
        }
        let w = zero_mass_weights(&mut r, n);
        let atoms = balls.iter().cloned().zip(w.iter().map(|&x| rat_int(x))).collect();
        let rho = AtomicMeasureB::new(p, atoms).map_err(err)?;
        let base = BerkPoint::gauss(p).map_err(err)?;
        if rho.is_zero() {
            continue;
        }
        let flux = energy_flux(&rho, &base).map_err(err)?;
        let atomic = energy_atomic_b(&rho, &rho).map_err(err)?;
        if flux != atomic {
            return Err(format!("instance {k}: flux {flux} != atomic {atomic}"));
        }
        let pair = AtomicMeasureB::dirac(balls[0].clone()).sub(&AtomicMeasureB::dirac(balls[1].clone())).map_err(err)?;
        let e = energy_atomic_b(&pair, &pair).map_err(err)?;
        let d = hyperbolic_distance(&balls[0], &balls[1]).map_err(err)?;
        if e.coeff != d {
            return Err(format!("instance {k}: energy {} != distance {d}", e.coeff));
        }
    }
    Ok(format!("500 measures exact ({} type II, {} type III atoms)", types[1], types[0]))
}

fn c5() -> Outcome {
    let mut r = rng(5);
    let k = standard_kernel();
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let n = r.gen_range(2..=8);
        let pts = (0..n).map(|_| {
            let z = Complex64::from_polar(r.gen_range(0.0..2.0), r.gen_range(0.0..std::f64::consts::TAU));
            PointC::Finite(z)
        });
        let f = AtomicMeasureC::uniform(pts.collect::<Vec<_>>());
        let eps = r.gen_range(0.01..0.5);
        let (lhs, rhs) = l120_check(&f, eps, k, 1e-10).map_err(err)?;
        worst = worst.min(rhs - lhs);
    }
    if worst < -1e-7 {
        return Err(format!("archimedean slack {worst:.2e}"));
    }
    for i in 0..200 {
        let p = PRIMES[i % PRIMES.len()];
        let n = r.gen_range(1..=8);
        let mut pts: Vec<BerkPoint> = Vec::new();
        while pts.len() < n {
            let c = rat(r.gen_range(-60..=60), (p as i64).pow(r.gen_range(0..3)));
            let s = BerkPoint::classical(p, c).map_err(err)?;
            if !pts.contains(&s) {
                pts.push(s);
            }
        }
        let eps_log = rat(r.gen_range(-12..=2), r.gen_range(1..=3));
        let (lhs, rhs) = l320_check(&pts, &eps_log).map_err(err)?;
        if lhs.coeff > rhs.coeff {
            return Err(format!("finite instance {i}: {} > {}", lhs.coeff, rhs.coeff));
        }
    }
    Ok(format!("archimedean min slack {worst:.2e}; 200 finite instances exact"))
}

fn report(json: &str) -> Result<ExperimentReport, String> {
    run(ExperimentConfig::from_json(json).map_err(err)?).map_err(err)
}

fn num(rep: &ExperimentReport, row: usize, name: &str) -> (f64, f64) {
    match rep.cell(row, name) {
        Some(Cell::Numeric { value, tol }) => (*value, *tol),
        other => panic!("{name}: {other:?}"),
    }
}

fn key(rep: &ExperimentReport, row: usize, name: &str) -> i64 {
    match rep.cell(row, name) {
        Some(Cell::Key(k)) => *k,
        other => panic!("{name}: {other:?}"),
    }
}

fn text(rep: &ExperimentReport, row: usize, name: &str) -> String {
    match rep.cell(row, name) {
        Some(Cell::Text(s)) => s.clone(),
        other => panic!("{name}: {other:?}"),
    }
}

fn c6() -> Outcome {
    let start = Instant::now();
    let rep = report(r#"{"kind":"roots_of_unity"}"#)?;
    within(start.elapsed(), 120.0)?;
    let ratios: Vec<f64> = (0..rep.rows.len()).map(|i| num(&rep, i, "ratio").0).collect();
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    check(
        rep.rows.len() == 30 && ratios.iter().all(|r| r.is_finite()) && c <= 10.0,
        format!("fitted C = {c:.3} over {} rows", rep.rows.len()),
    )
}

fn c7() -> Outcome {
    let mut r = rng(7);
    let maps = ["0,0,1", "-1,0,1", "1,0,1", "1,0,1|0,1"];
    let mut worst = 0.0f64;
    for m in maps {
        let map = RationalMapQ::parse(m).map_err(err)?;
        let d = map.degree() as f64;
        for _ in 0..50 {
            let x = ProjPoint::from_rat(&rat(r.gen_range(-999..=999), r.gen_range(1..=999)));
            let h = canonical_height_point_tol(&map, &x, 1e-12).map_err(err)?;
            let hy = canonical_height_point_tol(&map, &map.apply(&x), 1e-12).map_err(err)?;
            worst = worst.max((hy - d * h).abs());
        }
    }
    let sq = RationalMapQ::parse("0,0,1").map_err(err)?;
    let mut naive_gap = 0.0f64;
    for _ in 0..50 {
        let x = ProjPoint::from_rat(&rat(r.gen_range(-999..=999), r.gen_range(1..=999)));
        naive_gap = naive_gap.max((canonical_height_point_tol(&sq, &x, 1e-12).map_err(err)? - x.naive_height()).abs());
    }
    check(
        worst <= 1e-7 && naive_gap <= 1e-9,
        format!("max invariance residual {worst:.2e}; z^2 vs naive {naive_gap:.2e}"),
    )
}

fn c8() -> Outcome {
    let start = Instant::now();
    let rep = report(r#"{"kind":"periodic_points","parameters":{"n_min":2,"n_max":8,"samples":50000,"depth":30}}"#)?;
    within(start.elapsed(), 300.0)?;
    let names = ["re", "im", "abs2_capped"];
    let mut detail = Vec::new();
    let mut ok = true;
    for name in names {
        let series: Vec<(i64, f64, f64)> = (0..rep.rows.len())
            .filter(|&i| text(&rep, i, "test_function") == name)
            .map(|i| {
                let (lhs, tol) = num(&rep, i, "lhs");
                (key(&rep, i, "n"), lhs, tol)
            })
            .collect();
        let last = series.last().ok_or("no rows")?.1;
        ok &= last <= 0.02;
        for w in series.windows(3) {
            ok &= w[2].1 <= w[0].1 + w[2].2;
        }
        detail.push(format!("{name} final {last:.2e}"));
        if name == "abs2_capped" {
            let xs: Vec<f64> = series.iter().map(|s| s.0 as f64).collect();
            let ys: Vec<f64> = series.iter().map(|s| s.1.max(1e-300).ln()).collect();
            let slope = slope(&xs, &ys);
            ok &= slope < 0.0;
            detail.push(format!("log-slope {slope:.3}"));
        }
    }
    check(ok, detail.join(", "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn c9() -> Outcome {
    for n in 2..=12 {
        let m = critical_root_mean(2, n).map_err(err)?;
        if m != rat(-1, 2) {
            return Err(format!("root mean at n = {n} is {m}"));
        }
    }
    let rep = report(r#"{"kind":"mandelbrot","parameters":{"n_min":2,"n_max":11,"reference_n":12}}"#)?;
    let mut worst = 0.0f64;
    for i in 0..rep.rows.len() {
        let size = key(&rep, i, "size") as f64;
        worst = worst.max(num(&rep, i, "lhs").0 / (size.ln() / size));
    }
    check(worst <= 10.0, format!("root means all -1/2; max lhs/(log|F|/|F|) = {worst:.3}"))
}

fn c10() -> Outcome {
    let start = Instant::now();
    let rep = report(r#"{"kind":"basilica","parameters":{"primes":[3,5,7],"n_min":1,"n_max":4}}"#)?;
    within(start.elapsed(), 120.0)?;
    let flags = |name: &str| (0..rep.rows.len()).all(|i| rep.cell(i, name) == Some(&Cell::Flag(true)));
    let ratios: Vec<String> = (0..4)
        .map(|i| match rep.cell(i, "ratio_to_closed_form") {
            Some(Cell::Exact(q)) => q.to_string(),
            _ => "?".into(),
        })
        .collect();
    check(
        rep.rows.len() == 12 && flags("agree") && flags("negative"),
        format!("{} rows agree and negative; ratio to closed form at p = 3: {}", rep.rows.len(), ratios.join(", ")),
    )
}

fn c11() -> Outcome {
    let mut r = rng(11);
    for k in 0..200 {
        let p = PRIMES[k % PRIMES.len()];
        let count = r.gen_range(1..=5);
        let balls = distinct_balls(&mut r, p, count);
        let base = BerkPoint::gauss(p).map_err(err)?;
        let tree = FiniteTree::span(&balls, &base, &Truncation::default()).map_err(err)?;
        let vertices = tree.vertices().to_vec();
        let values = (0..vertices.len()).map(|_| rat(r.gen_range(-20..=20), r.gen_range(1..=4))).collect();
        let phi = TreeFunction::new(tree, values).map_err(err)?;
        if vertices.len() < 2 {
            continue;
        }
        let w = zero_mass_weights(&mut r, vertices.len());
        let atoms = vertices.into_iter().zip(w.iter().map(|&x| rat_int(x))).collect();
        let rho = AtomicMeasureB::new(p, atoms).map_err(err)?;
        let (lhs, rhs) = cauchy_schwarz_check(&phi, &rho).map_err(err)?;
        if lhs > rhs {
            return Err(format!("instance {k}: {lhs} > {rhs}"));
        }
    }
    Ok("200 tree instances, lhs <= rhs exactly".into())
}

fn main() {
    let criteria: [fn() -> Outcome; 11] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11];
    let mut unexpected = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                if !KNOWN_FAILURES.contains(&n) {
                    unexpected.push(n);
                }
                ("FAIL", d)
            }
        };
        writeln!(out, "criterion {n}: {status} {detail} ({secs:.2}s)").unwrap();
        out.flush().unwrap();
    }
    if !unexpected.is_empty() {
        writeln!(out, "unexpected failures: {unexpected:?}").unwrap();
        std::process::exit(1);
    }
}
