mod common;

use common::{poly_of_degree, q, random_poly};
use kfree_core::field::{int, rat, random_rational, Rational, RationalField};
use kfree_core::operators::{
    antiderivative, derive_catalan_coefficients, h_q, hq_identity_check, lemma35_forward_and_back, tilde_f,
    wronskian, wronskian_nth_derivative_binomial, wronskian_nth_derivative_catalan, FnMap,
};
use kfree_core::preserver::AffineSigmaPreserver;
use kfree_core::{Automorphism, QPoly};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn qpoly(max_len: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((-20i64..=20, 1i64..=6), 0..=max_len)
        .prop_map(|c| QPoly::new(RationalField, c.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

fn binom(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Catalan triangle `C(a, b) = (a − b + 1)/(a + 1)·binom(a + b, b)` for
/// `b ≤ a + 1`, zero beyond.
fn catalan_triangle(a: u64, b: u64) -> BigInt {
    if b > a + 1 {
        return BigInt::zero();
    }
    binom(a + b, b) * BigInt::from(a + 1 - b) / BigInt::from(a + 1)
}

#[test]
fn catalan_table_matches_closed_form() {
    let t = derive_catalan_coefficients(12).unwrap();
    for n in 0..=12u64 {
        for i in 0..=n.div_ceil(2) {
            let expected = catalan_triangle(n - i, i);
            assert_eq!(t.coefficient(n as usize, i as usize), Some(&expected), "n={n} i={i}");
        }
    }
    let diagonal: Vec<BigInt> = (0..5).map(|m| t.entry(m, m).unwrap().clone()).collect();
    assert_eq!(diagonal, [1, 1, 2, 5, 14].map(BigInt::from));
    assert!(derive_catalan_coefficients(13).is_err());
}

#[test]
fn expansions_match_iterated_derivative() {
    let table = derive_catalan_coefficients(8).unwrap();
    let mut rng = common::rng(35);
    for _ in 0..50 {
        let p = random_poly(&mut rng, 6, 9);
        let r = random_poly(&mut rng, 6, 9);
        let w = &(&p * &r.derivative()) - &(&p.derivative() * &r);
        let mut oracle = w.clone();
        for n in 0..=6 {
            assert_eq!(wronskian_nth_derivative_binomial(&p, &r, n), oracle);
            assert_eq!(wronskian_nth_derivative_catalan(&p, &r, n, &table).unwrap(), oracle);
            oracle = oracle.derivative();
        }
    }
    assert!(wronskian_nth_derivative_catalan(&q(&[1]), &q(&[0, 1]), 9, &table).is_err());
}

#[test]
fn examples() {
    assert_eq!(antiderivative(&q(&[0, 0, 1]), 1).unwrap(), QPoly::monomial(RationalField, rat(1, 3), 3));
    assert_eq!(wronskian(&q(&[0, 0, 1]), &q(&[0, 0, 0, 1])), q(&[0, 0, 0, 0, 1]));
    assert_eq!(wronskian(&q(&[1]), &q(&[0, 1])), q(&[1]));
    assert_eq!(h_q(&q(&[3]), &q(&[0, 1]), &q(&[1])).unwrap(), QPoly::zero(RationalField));
    let x = int(2);
    let p = common::linear_power(&x, 3);
    assert_eq!(lemma35_forward_and_back(&p, &q(&[1]), &x, 3).unwrap(), (true, true));
    assert_eq!(lemma35_forward_and_back(&q(&[1]), &q(&[0, 1]), &int(0), 2).unwrap(), (false, false));
    assert!(lemma35_forward_and_back(&q(&[0, 1]), &q(&[0, 0, 1]), &int(0), 2).is_err());
}

/// Pencil oracle: `λP + μQ` with a k-fold root at `x` exists exactly when the
/// forced candidate `Q(x)·P − P(x)·Q` (or `Q` itself when `Q(x) = 0`) has one.
fn pencil_oracle(p: &QPoly, r: &QPoly, x: &Rational, k: usize) -> bool {
    let cand = if r.evaluate(x).is_zero() {
        r.clone()
    } else {
        &p.scalar_mul(&r.evaluate(x)) - &r.scalar_mul(&p.evaluate(x))
    };
    cand.is_zero() || common::linear_power(x, k).divides(&cand)
}

/// `x` is a (k−1)-fold root of the Wronskian: its first k−1 derivatives vanish there.
fn wronskian_oracle(p: &QPoly, r: &QPoly, x: &Rational, k: usize) -> bool {
    let mut w = &(p * &r.derivative()) - &(&p.derivative() * r);
    for _ in 0..k - 1 {
        if !w.evaluate(x).is_zero() {
            return false;
        }
        w = w.derivative();
    }
    true
}

#[test]
fn lemma35_biconditional() {
    let mut rng = common::rng(355);
    let mut done = 0;
    let mut positives = 0;
    while done < 200 {
        let k = rng.gen_range(2..=4);
        let x = int(rng.gen_range(-2..=2));
        // Half the instances are built from a pencil with a k-fold root at x.
        let (p, r) = if done % 2 == 0 {
            let base = &common::linear_power(&x, k) * &random_poly(&mut rng, 6 - k, 5);
            let r = random_poly(&mut rng, 6, 5);
            let (l, m) = (common::nonzero_rational(&mut rng, 5), random_rational(&mut rng, 5));
            // base = l·p + m·r  ⇒  p = (base − m·r)/l.
            let p = (&base - &r.scalar_mul(&m)).scalar_mul(&(Rational::one() / l));
            (p, r)
        } else {
            (random_poly(&mut rng, 6, 5), random_poly(&mut rng, 6, 5))
        };
        if p.evaluate(&x).is_zero() && r.evaluate(&x).is_zero() {
            continue;
        }
        let (lhs, rhs) = lemma35_forward_and_back(&p, &r, &x, k).unwrap();
        assert_eq!(lhs, rhs, "P={p} Q={r} x={x} k={k}");
        assert_eq!(lhs, wronskian_oracle(&p, &r, &x, k));
        assert_eq!(rhs, pencil_oracle(&p, &r, &x, k));
        positives += lhs as usize;
        done += 1;
    }
    assert!(positives >= 100);
}

#[test]
fn hq_identity_random() {
    let mut rng = common::rng(36);
    for _ in 0..50 {
        let f1 = random_poly(&mut rng, 5, 7);
        let qq = random_poly(&mut rng, 5, 7);
        let p = random_poly(&mut rng, 5, 7);
        assert!(hq_identity_check(&f1, &qq, &p).unwrap());
        let h = h_q(&f1, &qq, &p).unwrap();
        assert!(h.degree_or_zero() <= f1.degree_or_zero() + qq.degree_or_zero() + p.degree_or_zero());
    }
    assert!(hq_identity_check(&q(&[1, 2]), &q(&[1]), &q(&[4, 0, 1])).unwrap());
}

#[test]
fn tilde_f_of_affine_map() {
    let mut rng = common::rng(3);
    for _ in 0..20 {
        let (a, b, c) = (
            common::nonzero_rational(&mut rng, 9),
            random_rational(&mut rng, 9),
            common::nonzero_rational(&mut rng, 9),
        );
        let prs = AffineSigmaPreserver::new(RationalField, a.clone(), b.clone(), c.clone(), Automorphism::Identity)
            .unwrap();
        let p = poly_of_degree(&mut rng, 3, 9);
        // Direct expansion: f̃(P) = c²·a·P(aX + b).
        let inner = QPoly::new(RationalField, vec![b.clone(), a.clone()]);
        let expected = p.compose(&inner).scalar_mul(&(&c * &c * &a));
        assert_eq!(tilde_f(&prs, &p).unwrap(), expected);
    }
    let id = FnMap(|p: &QPoly| Ok(p.clone()));
    let p = q(&[1, -3, 0, 2]);
    assert_eq!(tilde_f(&id, &p).unwrap(), p);
    let scale = FnMap(|p: &QPoly| Ok(p.scalar_mul(&int(5))));
    assert_eq!(tilde_f(&scale, &p).unwrap(), p.scalar_mul(&int(25)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn antiderivative_inverts_derivative(p in qpoly(9)) {
        prop_assert_eq!(antiderivative(&p, 1).unwrap().derivative(), p.clone());
        let back = antiderivative(&p.derivative(), 1).unwrap();
        prop_assert_eq!(back, &p - &QPoly::constant(RationalField, p.coeff(0)));
        prop_assert_eq!(antiderivative(&p, 3).unwrap().nth_derivative(3), p);
    }

    #[test]
    fn wronskian_bilinear_antisymmetric(a in qpoly(6), b in qpoly(6), c in qpoly(6), s in (-9i64..=9, 1i64..=5)) {
        let s = rat(s.0, s.1);
        prop_assert_eq!(wronskian(&a, &b), -&wronskian(&b, &a));
        prop_assert!(wronskian(&a, &a).is_zero());
        let lhs = wronskian(&(&a.scalar_mul(&s) + &c), &b);
        let rhs = &wronskian(&a, &b).scalar_mul(&s) + &wronskian(&c, &b);
        prop_assert_eq!(lhs, rhs);
    }
}
