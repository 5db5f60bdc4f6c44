mod common;

use common::{linear_power, nonzero_rational, q, random_poly};
use kfree_core::factor::factor_over_q;
use kfree_core::field::{int, rat, random_rational, Rational, RationalField};
use kfree_core::freeness::{
    analyze_codim_k_subspace, charp_identity_check, in_span, is_k_free, k_fold_roots, lemma32_check,
    SubspaceResult,
};
use kfree_core::poly::Polynomial;
use kfree_core::{Error, PrimeField, QPoly, QuadraticField};
use rand::Rng;

/// Oracle: max multiplicity in the Kronecker factorization is below `k`.
fn oracle_k_free(p: &QPoly, k: usize) -> bool {
    factor_over_q(p).unwrap().max_multiplicity() < k
}

/// Random polynomial of degree ≤ 8 that is frequently not k-free.
fn freeness_sample(rng: &mut rand_chacha::ChaCha8Rng) -> QPoly {
    match rng.gen_range(0..3) {
        0 => random_poly(rng, 8, 9),
        1 => {
            let m = rng.gen_range(2..=4);
            let x = random_rational(rng, 5);
            &linear_power(&x, m) * &random_poly(rng, 8 - m, 9)
        }
        _ => {
            let f = common::rootless_quadratic(rng, 4);
            let m = rng.gen_range(2..=3);
            &f.pow(m as u32) * &random_poly(rng, 8 - 2 * m, 9)
        }
    }
}

#[test]
fn oracle_equivalence() {
    let mut rng = common::rng(2024);
    let mut non_free = 0;
    for i in 0..200 {
        let p = freeness_sample(&mut rng);
        let k = 2 + i % 2;
        let v = is_k_free(&p, k).unwrap();
        assert_eq!(v.is_k_free, oracle_k_free(&p, k), "P = {p}, k = {k}");
        if let Some(w) = &v.witness_factor {
            non_free += 1;
            assert!(w.pow(k as u32).divides(&p), "witness {w}^{k} does not divide {p}");
            assert!(!w.is_constant());
        } else {
            assert!(v.is_k_free);
        }
    }
    assert!(non_free > 40, "sampler too rarely produced non-k-free inputs");
}

#[test]
fn examples() {
    let v = is_k_free(&(&q(&[-5, 1]) * &q(&[1, 0, 1]).pow(3)), 3).unwrap();
    assert_eq!(v.witness_factor, Some(q(&[1, 0, 1])));
    assert!(is_k_free(&q(&[-1, 0, 1]), 2).unwrap().is_k_free);
    assert_eq!(k_fold_roots(&q(&[0, 0, 0, -1, 1]), 2).unwrap(), vec![int(0)]);
    let f = QuadraticField::new(6).unwrap();
    let p = &Polynomial::linear(f, &f.sqrt_d()).pow(2) * &Polynomial::from_ints(f, &[1, 1]);
    assert_eq!(k_fold_roots(&p, 2).unwrap(), vec![f.sqrt_d()]);
    let f7 = PrimeField::new(3).unwrap();
    assert!(matches!(
        is_k_free(&Polynomial::from_ints(f7, &[1, 1]), 3),
        Err(Error::CharacteristicTooSmall { .. })
    ));
}

#[test]
fn k_fold_roots_monotone_in_k() {
    let mut rng = common::rng(8);
    for _ in 0..60 {
        let p = freeness_sample(&mut rng);
        for k in 2..=4 {
            let hi = k_fold_roots(&p, k).unwrap();
            let lo = k_fold_roots(&p, k - 1).unwrap();
            assert!(hi.iter().all(|x| lo.contains(x)));
            for x in &hi {
                assert!(linear_power(x, k).divides(&p));
            }
        }
    }
}

#[test]
fn lemma32_random_instances() {
    let mut rng = common::rng(32);
    let mut checked = 0;
    while checked < 50 {
        let p = common::poly_of_degree(&mut rng, 6, 9);
        let x = random_rational(&mut rng, 4);
        let k = rng.gen_range(2..=3);
        if linear_power(&x, k).divides(&p) {
            continue;
        }
        let mut lambdas: Vec<Rational> = Vec::new();
        while lambdas.len() < 7 {
            let l = random_rational(&mut rng, 20);
            if !lambdas.contains(&l) {
                lambdas.push(l);
            }
        }
        assert!(lemma32_check(&p, &x, k, &lambdas).unwrap());
        checked += 1;
    }
    assert!(lemma32_check(&q(&[1]), &int(0), 2, &[int(0), int(1)]).unwrap());
    assert!(lemma32_check(&q(&[1, 0, 1]), &int(0), 2, &[int(0), int(0), int(1)]).is_err());
}

fn codim_basis(x: &Rational, k: usize, n: usize) -> Vec<QPoly> {
    (0..=n - k)
        .map(|j| &linear_power(x, k) * &QPoly::monomial(RationalField, int(1), j))
        .collect()
}

#[test]
fn codim_k_recovers_large_points() {
    let mut rng = common::rng(1_000_000);
    for _ in 0..25 {
        let x = rat(rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(1..=1_000_000));
        let k = rng.gen_range(2..=3);
        let n = rng.gen_range(k + 1..=10);
        let a = analyze_codim_k_subspace(&codim_basis(&x, k, n), k, n).unwrap();
        assert_eq!(a.result, SubspaceResult::FoundPoint(x));
    }
}

#[test]
fn codim_k_witness_on_perturbed_spans() {
    let mut rng = common::rng(77);
    for _ in 0..30 {
        let x = random_rational(&mut rng, 5);
        let k = rng.gen_range(2..=3);
        let n = rng.gen_range(k + 1..=8);
        let mut basis = codim_basis(&x, k, n);
        let j = rng.gen_range(0..basis.len());
        let low = common::random_poly(&mut rng, k - 1, 4);
        basis[j] = &basis[j] + &low;
        let a = analyze_codim_k_subspace(&basis, k, n).unwrap();
        match a.result {
            SubspaceResult::KFreeWitness(w) => {
                assert!(oracle_k_free(&w, k));
                assert!(in_span(&basis, &w));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }
}

#[test]
fn codim_k_rejects_bad_input() {
    let basis = codim_basis(&int(1), 2, 5);
    assert!(analyze_codim_k_subspace(&basis[1..], 2, 5).is_err());
    let mut dep = basis.clone();
    dep[1] = dep[0].clone();
    assert!(analyze_codim_k_subspace(&dep, 2, 5).is_err());
    let _ = nonzero_rational;
}

/// `(X² + λ(X − x))^k` and `X^{2k} + λ(X − x)^k` over `F_p` with naive
/// coefficient-vector arithmetic.
fn charp_oracle(p: u64, k: usize, x: u64, lam: u64) -> bool {
    let mul = |a: &[u64], b: &[u64]| {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        out
    };
    let pow = |base: &[u64], e: usize| (0..e).fold(vec![1], |acc, _| mul(&acc, base));
    let neg_x = (p - x % p) % p;
    let lhs_base = [lam * neg_x % p, lam, 1];
    let lhs = pow(&lhs_base, k);
    let lin = pow(&[neg_x, 1], k);
    let mut rhs = vec![0; 2 * k + 1];
    rhs[2 * k] = 1;
    for (i, c) in lin.iter().enumerate() {
        rhs[i] = (rhs[i] + lam * c) % p;
    }
    lhs == rhs
}

#[test]
fn charp_exhaustive() {
    for p in [2u64, 3, 5] {
        for x in 0..p {
            for lam in 0..p {
                assert!(charp_oracle(p, p as usize, x, lam));
                assert!(charp_identity_check(p, 1, x, lam).unwrap(), "p={p} x={x} λ={lam}");
            }
        }
    }
    assert!(charp_identity_check(2, 2, 1, 1).unwrap());
    assert!(charp_identity_check(4, 1, 0, 0).is_err());
}
