mod common;

use common::{brute_rational_roots, integer_coeffs, q};
use kfree_core::factor::{factor_over_q, rational_roots};
use kfree_core::field::{rat, QuadraticField, Rational, RationalField};
use kfree_core::poly::Polynomial;
use kfree_core::text::{format_polynomial, parse_polynomial};
use kfree_core::{Automorphism, Field, PrimeField, QPoly};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn qpoly(max_len: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((-30i64..=30, 1i64..=9), 0..=max_len).prop_map(|c| {
        QPoly::new(
            RationalField,
            c.into_iter().map(|(n, d)| rat(n, d)).collect(),
        )
    })
}

fn quad(d: i64, max_len: usize) -> impl Strategy<Value = Polynomial<QuadraticField>> {
    let f = QuadraticField::new(d).unwrap();
    prop::collection::vec((-9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5), 0..=max_len).prop_map(
        move |c| {
            Polynomial::new(
                f,
                c.into_iter()
                    .map(|(a, b, u, v)| f.elem(rat(a, b), rat(u, v)))
                    .collect(),
            )
        },
    )
}

/// A polynomial of degree ≥ 4 is reducible only if it has a factor of degree
/// ≤ deg/2. This checks degrees 2 and 3 directly (linear via rational roots,
/// quadratic by interpolating candidate values at 0, 1, −1).
fn has_small_factor(p: &QPoly) -> bool {
    if !brute_rational_roots(p).is_empty() {
        return true;
    }
    let deg = p.degree().unwrap();
    if deg < 4 {
        return false;
    }
    assert!(deg <= 5, "oracle only covers degree ≤ 5");
    let ints = integer_coeffs(p);
    let zp = QPoly::new(
        RationalField,
        ints.into_iter().map(Rational::from_integer).collect(),
    );
    let vals: Vec<i64> = [0, 1, -1]
        .iter()
        .map(|x| {
            let v = zp.evaluate(&rat(*x, 1));
            i64::try_from(v.to_integer()).expect("small")
        })
        .collect();
    let divs = |n: i64| -> Vec<i64> {
        let n = n.abs();
        (1..=n).filter(|d| n % d == 0).flat_map(|d| [d, -d]).collect()
    };
    for a in divs(vals[0]) {
        for b in divs(vals[1]) {
            for c in divs(vals[2]) {
                // g(0)=a, g(1)=b, g(−1)=c.
                let g2 = rat(b + c - 2 * a, 2);
                if g2.is_zero() {
                    continue;
                }
                let g1 = rat(b - c, 2);
                let g = QPoly::new(RationalField, vec![rat(a, 1), g1, g2]);
                if g.divides(&zp) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn examples() {
    let (x, r) = q(&[5, 2, 0, 1]).euclid_div(&q(&[1, 0, 1])).unwrap();
    assert_eq!((x, r), (q(&[0, 1]), q(&[5, 1])));
    let a = &q(&[-2, 1]).pow(3) * &q(&[1, 1]);
    let b = &q(&[-2, 1]) * &q(&[3, 1]);
    assert_eq!(a.gcd(&b).unwrap(), q(&[-2, 1]));
    assert_eq!(
        rational_roots(&q(&[1, -5, 6])).unwrap(),
        vec![(rat(1, 3), 1), (rat(1, 2), 1)]
    );
    let p = &q(&[1, 1, 1]).pow(2) * &q(&[-3, 1]);
    let fact = factor_over_q(&p).unwrap();
    assert_eq!(fact.factors, vec![(q(&[-3, 1]), 1), (q(&[1, 1, 1]), 2)]);
    assert!(factor_over_q(&q(&[1; 14])).is_err());
}

#[test]
fn factorization_oracle() {
    let mut rng = common::rng(11);
    for _ in 0..60 {
        // Products of small factors keep every irreducible factor at degree ≤ 5.
        let mut p = QPoly::one(RationalField);
        let mut deg = 0;
        while deg < 7 {
            let d = rand::Rng::gen_range(&mut rng, 1..=3);
            let f = QPoly::new(
                RationalField,
                (0..=d)
                    .map(|i| {
                        let v = rand::Rng::gen_range(&mut rng, -4i64..=4);
                        rat(if i == d && v == 0 { 1 } else { v }, 1)
                    })
                    .collect(),
            );
            let m = rand::Rng::gen_range(&mut rng, 1..=2);
            p = &p * &f.pow(m);
            deg += d * m as usize;
        }
        let fact = factor_over_q(&p).unwrap();
        assert_eq!(fact.expand(), p);
        for (f, _) in &fact.factors {
            assert_eq!(f.leading_coeff(), Some(&rat(1, 1)));
            if f.degree().unwrap() > 1 && f.degree().unwrap() <= 5 {
                assert!(!has_small_factor(f), "{f} splits");
            }
        }
        let mut oracle_roots: Vec<Rational> = brute_rational_roots(&p);
        oracle_roots.sort();
        let roots: Vec<Rational> = rational_roots(&p).unwrap().into_iter().map(|(r, _)| r).collect();
        assert_eq!(roots, oracle_roots);
    }
}

#[test]
fn gcd_constructed_triples() {
    let mut rng = common::rng(5);
    for _ in 0..50 {
        let g = common::random_poly(&mut rng, 3, 6);
        let a = &g * &common::random_poly(&mut rng, 3, 6);
        let b = &g * &common::random_poly(&mut rng, 3, 6);
        let h = a.gcd(&b).unwrap();
        assert!(h.divides(&a) && h.divides(&b));
        assert!(g.divides(&h), "common divisor {g} does not divide gcd {h}");
    }
}

#[test]
fn conjugation_fixes_rationals() {
    let f = QuadraticField::new(7).unwrap();
    for (n, d) in [(0, 1), (3, 4), (-5, 2)] {
        let x = f.from_rational(&rat(n, d)).unwrap();
        assert_eq!(f.conjugate(&x), x);
    }
    assert_eq!(
        f.conjugate(&f.elem(rat(1, 1), rat(2, 1))),
        f.elem(rat(1, 1), rat(-2, 1))
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn euclid_division(p in qpoly(9), d in qpoly(5)) {
        prop_assume!(!d.is_zero());
        let (quo, rem) = p.euclid_div(&d).unwrap();
        prop_assert_eq!(&(&quo * &d) + &rem, p);
        prop_assert!(rem.degree() < d.degree());
    }

    #[test]
    fn product_rule(p in qpoly(7), r in qpoly(7)) {
        let lhs = (&p * &r).derivative();
        let rhs = &(&p.derivative() * &r) + &(&p * &r.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_evaluates(p in qpoly(5), r in qpoly(3), x in (-5i64..=5, 1i64..=4)) {
        let x = rat(x.0, x.1);
        prop_assert_eq!(p.compose(&r).evaluate(&x), p.evaluate(&r.evaluate(&x)));
        prop_assert_eq!(p.evaluate(&x), common::eval_naive(&p, &x));
    }

    #[test]
    fn conjugation_is_ring_morphism(a in quad(-3, 4), b in quad(-3, 4)) {
        let s = Automorphism::Conjugation;
        prop_assert_eq!((&a * &b).apply_automorphism(s), &a.apply_automorphism(s) * &b.apply_automorphism(s));
        prop_assert_eq!((&a + &b).apply_automorphism(s), &a.apply_automorphism(s) + &b.apply_automorphism(s));
        prop_assert_eq!(a.apply_automorphism(s).apply_automorphism(s), a);
    }

    #[test]
    fn text_round_trip_q(p in qpoly(8)) {
        let text = format_polynomial(&p);
        prop_assert_eq!(parse_polynomial(&text, &RationalField).unwrap(), p);
    }

    #[test]
    fn text_round_trip_quadratic(p in quad(5, 6)) {
        let text = format_polynomial(&p);
        prop_assert_eq!(parse_polynomial(&text, p.field()).unwrap(), p);
    }

    #[test]
    fn text_round_trip_prime(c in prop::collection::vec(0u64..101, 0..8)) {
        let f = PrimeField::new(101).unwrap();
        let p = Polynomial::new(f, c);
        let text = format_polynomial(&p);
        prop_assert_eq!(parse_polynomial(&text, &f).unwrap(), p);
    }

    #[test]
    fn integer_scaling_is_exact(p in qpoly(6)) {
        prop_assume!(!p.is_zero());
        let ints = integer_coeffs(&p);
        let ratio = Rational::from_integer(ints[p.degree().unwrap()].clone()) / p.leading_coeff().unwrap();
        for (i, c) in p.coeffs().iter().enumerate() {
            prop_assert_eq!(Rational::from_integer(ints[i].clone()), c * &ratio);
        }
        prop_assert!(ints.iter().all(|c: &BigInt| c.bits() < 64));
    }
}
