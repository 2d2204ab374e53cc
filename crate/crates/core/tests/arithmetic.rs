use adelic_core::arith::{
    BigRat, IntPoly, format_rat, newton_polygon_root_valuations, padic_valuation, parse_rat, rat, rat_int, resultant,
};
use adelic_core::arith::integer::Valuation;
use adelic_core::heights::{AlgebraicSet, naive_height, naive_height_mahler, product_formula_residual};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn poly(max_degree: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-9i64..=9, 2..=max_degree + 1)
        .prop_filter("nonconstant", |c| c[1..].iter().any(|&x| x != 0))
        .prop_map(|c| IntPoly::from_i64(&c))
}

fn valuation(n: &BigInt, p: u64) -> i64 {
    match padic_valuation(&BigRat::from_integer(n.clone()), p).unwrap() {
        Valuation::Finite(k) => k,
        Valuation::Infinite => panic!("zero"),
    }
}

proptest! {
    #[test]
    fn product_formula(n in 1i64..=1_000_000_000, d in 1i64..=1_000_000_000, neg: bool) {
        let q = rat(if neg { -n } else { n }, d);
        prop_assert!(product_formula_residual(&q).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..=10_000, d in 1i64..=10_000) {
        let q = rat(n, d);
        prop_assert_eq!(parse_rat(&format_rat(&q)).unwrap(), q);
    }

    #[test]
    fn resultant_is_antisymmetric_up_to_sign(p in poly(5), q in poly(5)) {
        let a = resultant(&p, &q).unwrap();
        let b = resultant(&q, &p).unwrap();
        let sign = if (p.degree() * q.degree()) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(a, b * sign);
    }

    #[test]
    fn resultant_against_linear_is_evaluation(q in poly(6), a in -20i64..=20) {
        let lin = IntPoly::from_i64(&[-a, 1]);
        prop_assert_eq!(resultant(&lin, &q).unwrap(), q.eval_int(&BigInt::from(a)));
    }

    #[test]
    fn resultant_is_multiplicative(p in poly(3), q in poly(3), s in poly(3)) {
        let pq = &p * &q;
        prop_assert_eq!(resultant(&pq, &s).unwrap(), resultant(&p, &s).unwrap() * resultant(&q, &s).unwrap());
    }

    #[test]
    fn newton_polygon_sums_to_valuation_quotient(p in poly(8), prime in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(!p.coeff(0).is_zero());
        let vals = newton_polygon_root_valuations(&p, prime).unwrap();
        prop_assert_eq!(vals.len(), p.degree());
        let total = vals.iter().map(|v| v.finite().unwrap().clone()).fold(rat_int(0), |a, b| a + b);
        prop_assert_eq!(total, rat_int(valuation(&p.coeff(0), prime) - valuation(&p.lc(), prime)));
    }

    #[test]
    fn naive_height_matches_mahler(p in poly(10)) {
        let Ok(f) = AlgebraicSet::from_poly(&p) else { return Ok(()) };
        let (a, b) = (naive_height(&f).unwrap(), naive_height_mahler(&f).unwrap());
        prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        prop_assert!(a >= -1e-12);
    }
}

#[test]
fn heights_of_small_sets() {
    let f = AlgebraicSet::from_poly(&IntPoly::from_i64(&[-2, 0, 1])).unwrap();
    assert!((naive_height(&f).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-12);
    let unity = AlgebraicSet::roots_of_unity(12).unwrap();
    assert!(naive_height(&unity).unwrap().abs() < 1e-12);
    assert_eq!(resultant(&IntPoly::from_i64(&[1, 1]), &IntPoly::from_i64(&[-1, 1])).unwrap(), BigInt::from(-2));
}
