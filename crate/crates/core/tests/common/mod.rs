#![allow(dead_code)]

use kfree_core::field::{int, random_rational, Rational, RationalField};
use kfree_core::QPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng, height: u64) -> Rational {
    loop {
        let q = random_rational(rng, height);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Random polynomial of degree exactly `deg`.
pub fn poly_of_degree(rng: &mut ChaCha8Rng, deg: usize, height: u64) -> QPoly {
    let mut c: Vec<Rational> = (0..deg).map(|_| random_rational(rng, height)).collect();
    c.push(nonzero_rational(rng, height));
    QPoly::new(RationalField, c)
}

/// Random nonzero polynomial of degree ≤ `max_deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, height: u64) -> QPoly {
    let d = rng.gen_range(0..=max_deg);
    poly_of_degree(rng, d, height)
}

pub fn linear_power(x: &Rational, m: usize) -> QPoly {
    QPoly::linear(RationalField, x).pow(m as u32)
}

pub fn q(c: &[i64]) -> QPoly {
    QPoly::from_ints(RationalField, c)
}

/// Scales to integer coefficients.
pub fn integer_coeffs(p: &QPoly) -> Vec<BigInt> {
    let l = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
        .collect()
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out
}

/// Distinct rational roots by the rational-root theorem with plain divisor
/// enumeration; coefficients must stay small.
pub fn brute_rational_roots(p: &QPoly) -> Vec<Rational> {
    assert!(!p.is_zero());
    let mut c = integer_coeffs(p);
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(int(0));
        while c[0].is_zero() {
            c.remove(0);
        }
    }
    if c.len() == 1 {
        return roots;
    }
    let a0 = c[0].abs().to_u64().expect("small constant term");
    let an = c.last().unwrap().abs().to_u64().expect("small leading term");
    for num in divisors(a0) {
        for den in divisors(an) {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(s) * BigInt::from(num), BigInt::from(den));
                let v = c
                    .iter()
                    .rev()
                    .fold(Rational::zero(), |acc, ci| acc * &r + Rational::from_integer(ci.clone()));
                if v.is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Evaluates by direct summation of `c_i x^i`.
pub fn eval_naive(p: &QPoly, x: &Rational) -> Rational {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(x.clone(), i))
        .sum()
}

/// Random monic quadratic with negative discriminant.
pub fn rootless_quadratic(rng: &mut ChaCha8Rng, height: u64) -> QPoly {
    loop {
        let b = random_rational(rng, height);
        let c = random_rational(rng, height);
        if (&b * &b - int(4) * &c).is_negative() {
            return QPoly::new(RationalField, vec![c, b, int(1)]);
        }
    }
}
