use adelic_core::arith::{BigRat, IntPoly, rat, rat_int};
use adelic_core::berkovich::{
    AtomicMeasureB, BerkPoint, FiniteTree, TreeFunction, Truncation, cauchy_schwarz_check, energy_atomic_b,
    energy_flux, hyperbolic_distance, l320_check,
};
use adelic_core::dynamics::green::canonical_height_point_tol;
use adelic_core::dynamics::{ProjPoint, RationalMapQ, transformation_check};
use adelic_core::heights::{AlgebraicSet, LocalMeasure, Place, local_height_term, pairing_finite_sets};
use adelic_core::Error;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn small_rat() -> impl Strategy<Value = BigRat> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn ball(p: u64) -> impl Strategy<Value = BerkPoint> {
    (small_rat(), -6i64..=6, 1i64..=3).prop_map(move |(c, n, d)| BerkPoint::ball(p, c, rat(n, d)).unwrap())
}

fn balls() -> impl Strategy<Value = (u64, Vec<BerkPoint>)> {
    prime().prop_flat_map(|p| (Just(p), prop::collection::vec(ball(p), 2..=6)))
}

fn dedup(mut v: Vec<BerkPoint>) -> Vec<BerkPoint> {
    let mut out = Vec::new();
    for b in v.drain(..) {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn zero_mass(p: u64, pts: &[BerkPoint], w: &[i64]) -> AtomicMeasureB {
    let mut w: Vec<i64> = w[..pts.len() - 1].to_vec();
    w.push(-w.iter().sum::<i64>());
    AtomicMeasureB::new(p, pts.iter().cloned().zip(w.into_iter().map(rat_int)).collect()).unwrap()
}

proptest! {
    #[test]
    fn distance_is_a_metric((_, b) in balls()) {
        let d = |s: &BerkPoint, t: &BerkPoint| hyperbolic_distance(s, t).unwrap();
        prop_assert_eq!(d(&b[0], &b[0]), rat_int(0));
        prop_assert_eq!(d(&b[0], &b[1]), d(&b[1], &b[0]));
        prop_assert!(d(&b[0], &b[1]) <= d(&b[0], &b[2 % b.len()]) + d(&b[2 % b.len()], &b[1]));
    }

    #[test]
    fn flux_equals_atomic_energy((p, b) in balls(), w in prop::collection::vec(-3i64..=3, 6)) {
        let b = dedup(b);
        prop_assume!(b.len() >= 2);
        let rho = zero_mass(p, &b, &w);
        prop_assume!(!rho.is_zero());
        let base = BerkPoint::gauss(p).unwrap();
        let flux = energy_flux(&rho, &base).unwrap();
        prop_assert_eq!(&flux, &energy_atomic_b(&rho, &rho).unwrap());
        prop_assert!(flux.coeff > rat_int(0));
    }

    #[test]
    fn cauchy_schwarz_on_trees((p, b) in balls(), values in prop::collection::vec(-20i64..=20, 32), w in prop::collection::vec(-3i64..=3, 32)) {
        let base = BerkPoint::gauss(p).unwrap();
        let tree = FiniteTree::span(&dedup(b), &base, &Truncation::default()).unwrap();
        let vertices = tree.vertices().to_vec();
        prop_assume!(vertices.len() >= 2 && vertices.len() <= 32);
        let phi = TreeFunction::new(tree, values[..vertices.len()].iter().map(|&x| rat(x, 3)).collect()).unwrap();
        let rho = zero_mass(p, &vertices, &w);
        let (lhs, rhs) = cauchy_schwarz_check(&phi, &rho).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn regularized_energy_bound(p in prime(), centers in prop::collection::vec(small_rat(), 1..=8), n in -12i64..=2, d in 1i64..=3) {
        let mut pts: Vec<BerkPoint> = centers.into_iter().map(|c| BerkPoint::classical(p, c).unwrap()).collect();
        pts = dedup(pts);
        let (lhs, rhs) = l320_check(&pts, &rat(n, d)).unwrap();
        prop_assert!(lhs.coeff <= rhs.coeff);
    }

    #[test]
    fn local_terms_are_nonnegative(c in prop::collection::vec(-15i64..=15, 2..=7), p in prime()) {
        let Ok(f) = AlgebraicSet::from_poly(&IntPoly::from_i64(&c)) else { return Ok(()) };
        let t = local_height_term(&f, &LocalMeasure::lambda(Place::Finite(p))).unwrap();
        prop_assert!(t.as_exact().unwrap().coeff >= rat_int(0));
    }

    #[test]
    fn pairing_is_symmetric(a in prop::collection::vec(-9i64..=9, 2..=5), b in prop::collection::vec(-9i64..=9, 2..=5), p in prime()) {
        let (Ok(f), Ok(g)) = (AlgebraicSet::from_poly(&IntPoly::from_i64(&a)), AlgebraicSet::from_poly(&IntPoly::from_i64(&b))) else { return Ok(()) };
        prop_assume!(!f.meets(&g));
        for v in [Place::Archimedean, Place::Finite(p)] {
            let x = pairing_finite_sets(&f, &g, v).unwrap();
            let y = pairing_finite_sets(&g, &f, v).unwrap();
            prop_assert!((x.to_f64() - y.to_f64()).abs() <= 1e-9 + x.tol() + y.tol());
        }
    }

    #[test]
    fn canonical_height_is_invariant(c in small_rat(), x in small_rat()) {
        let r = RationalMapQ::unicritical(2, &c).unwrap();
        let x = ProjPoint::from_rat(&x);
        let h = canonical_height_point_tol(&r, &x, 1e-12).unwrap();
        let hy = canonical_height_point_tol(&r, &r.apply(&x), 1e-12).unwrap();
        prop_assert!((hy - 2.0 * h).abs() <= 1e-7, "{} vs {}", hy, 2.0 * h);
        prop_assert!(h >= -1e-12);
    }

    #[test]
    fn transformation_residual_vanishes(z in prop::collection::vec(small_rat(), 4), p in prime()) {
        let r = RationalMapQ::parse("-1,0,1").unwrap();
        let one = rat_int(1);
        let atoms: Vec<Vec<(BigRat, BigRat)>> = z.into_iter().map(|q| vec![(q, one.clone())]).collect();
        for v in [Place::Archimedean, Place::Finite(p)] {
            match transformation_check(&r, &atoms[0], &atoms[1], &atoms[2], &atoms[3], v) {
                Ok(t) => {
                    prop_assert!(t.residual.abs() <= 1e-8, "{:?}", t);
                    if let Some(e) = t.exact_residual {
                        prop_assert_eq!(e.coeff, rat_int(0));
                    }
                }
                Err(Error::Inadmissible(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
