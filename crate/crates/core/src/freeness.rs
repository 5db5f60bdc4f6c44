//! k-free tests, k-fold roots, and the checks built on them.
//!
//! A polynomial is k-free when no irreducible factor appears with
//! multiplicity k or more. In characteristic zero, or characteristic above
//! `k`, that is the case exactly when `gcd(P, P′, …, P^(k−1))` is constant.

use crate::error::{Error, Result};
use crate::field::{is_prime, Field, PrimeField, Rational, RationalField};
use crate::linalg::reduce_by_leading_monomial;
use crate::poly::{Polynomial, QPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KFreeVerdict<F: Field> {
    pub is_k_free: bool,
    /// An irreducible factor whose k-th power divides the input. Absent when
    /// the input is k-free, and over fields without factorization support.
    pub witness_factor: Option<Polynomial<F>>,
}

fn check_characteristic<F: Field>(field: &F, k: usize) -> Result<()> {
    let ch = field.characteristic();
    if ch != 0 && ch <= k as u64 {
        return Err(Error::CharacteristicTooSmall { characteristic: ch, k });
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `gcd(P, P′, …, P^(k−1))`, monic.
pub fn derivative_gcd<F: Field>(p: &Polynomial<F>, k: usize) -> Result<Polynomial<F>> {
    let mut g = p.monic();
    let mut d = p.clone();
    for _ in 1..k {
        if g.is_constant() {
            break;
        }
        d = d.derivative();
        g = g.gcd(&d)?;
    }
    Ok(g)
}

pub fn is_k_free<F: Field>(p: &Polynomial<F>, k: usize) -> Result<KFreeVerdict<F>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_k(k)?;
    check_characteristic(p.field(), k)?;
    let g = derivative_gcd(p, k)?;
    if g.is_constant() {
        return Ok(KFreeVerdict {
            is_k_free: true,
            witness_factor: None,
        });
    }
    let witness_factor = p.field().irreducible_divisor(&g);
    if let Some(w) = &witness_factor {
        debug_assert!(w.pow(k as u32).divides(p));
    }
    Ok(KFreeVerdict {
        is_k_free: false,
        witness_factor,
    })
}

/// Shorthand for callers that only need the boolean.
pub fn k_free<F: Field>(p: &Polynomial<F>, k: usize) -> Result<bool> {
    Ok(is_k_free(p, k)?.is_k_free)
}

/// The roots `x` in the coefficient field with `(X − x)^k | P`.
pub fn k_fold_roots<F: Field>(p: &Polynomial<F>, k: usize) -> Result<Vec<F::Elem>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    // Roots of multiplicity ≥ k are roots of the derivative gcd when the
    // characteristic allows it; that keeps root finding on a smaller input.
    let ch = p.field().characteristic();
    let search = if k >= 2 && (ch == 0 || ch > k as u64) {
        derivative_gcd(p, k)?
    } else {
        p.clone()
    };
    if search.is_constant() {
        return Ok(Vec::new());
    }
    Ok(p.field()
        .roots_of(&search)?
        .into_iter()
        .filter(|x| p.root_multiplicity(x) >= k)
        .collect())
}

/// `P − (1/k)(X − x)P′`, which does not depend on `λ` when `P` is replaced by
/// `P + λ(X − x)^k`.
pub fn tilde_p<F: Field>(p: &Polynomial<F>, x: &F::Elem, k: usize) -> Result<Polynomial<F>> {
    let f = p.field();
    let inv_k = f
        .inv(&f.from_int(k as i64))
        .ok_or_else(|| Error::InvalidArgument(format!("{k} is zero in {}", f.spec())))?;
    let shift = Polynomial::linear(f.clone(), x);
    Ok(p - &(&shift * &p.derivative()).scalar_mul(&inv_k))
}

/// On one instance: either `(X − x)^k | P`, or some `λ` in the list makes
/// `P + λ(X − x)^k` k-free. The list needs `1 + deg P` distinct entries.
pub fn lemma32_check<F: Field>(p: &Polynomial<F>, x: &F::Elem, k: usize, lambdas: &[F::Elem]) -> Result<bool> {
    check_k(k)?;
    check_characteristic(p.field(), k)?;
    let f = p.field();
    let need = 1 + p.degree_or_zero();
    if lambdas.len() < need {
        return Err(Error::InvalidArgument(format!(
            "need at least {need} values of lambda, got {}",
            lambdas.len()
        )));
    }
    for (i, a) in lambdas.iter().enumerate() {
        if lambdas[..i].contains(a) {
            return Err(Error::InvalidArgument(format!("duplicate lambda {}", f.format(a))));
        }
    }
    let power = Polynomial::linear(f.clone(), x).pow(k as u32);
    if power.divides(p) {
        return Ok(true);
    }
    for l in lambdas {
        let q = p + &power.scalar_mul(l);
        if !q.is_zero() && k_free(&q, k)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The identity `X^{2k} + λ(X − x)^k = (X² + r(X − x))^k` over `F_p` for
/// `k = p^e`, where `r^k = λ`. Since Frobenius fixes `F_p`, `r = λ`; it is
/// computed as `λ^m` with `m·k ≡ 1 (mod p − 1)` and checked.
pub fn charp_identity_check(p: u64, e: u32, x: u64, lam: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    let k = p
        .checked_pow(e)
        .filter(|&k| k <= CHARP_DEGREE_CAP)
        .ok_or_else(|| Error::InvalidArgument(format!("{p}^{e} exceeds {CHARP_DEGREE_CAP}")))?;
    let f = PrimeField::new(p)?;
    let (x, lam) = (x % p, lam % p);
    let root = kth_root(&f, lam, k);
    if f.pow(&root, k) != lam {
        return Ok(false);
    }
    let shift = Polynomial::linear(f, &x);
    let lhs = &Polynomial::monomial(f, 1, 2 * k as usize) + &shift.pow(k as u32).scalar_mul(&lam);
    let inner = &Polynomial::monomial(f, 1, 2) + &shift.scalar_mul(&root);
    Ok(lhs == inner.pow(k as u32))
}

/// Largest `k = p^e` accepted by [`charp_identity_check`].
pub const CHARP_DEGREE_CAP: u64 = 4096;

fn kth_root(f: &PrimeField, lam: u64, k: u64) -> u64 {
    let p = f.modulus();
    if lam == 0 || p == 2 {
        return lam;
    }
    let order = p - 1;
    // k is a power of p, hence coprime to p − 1.
    let m = (1..order).find(|m| (m * (k % order)) % order == 1).unwrap_or(1);
    f.pow(&lam, m)
}

/// Outcome of analyzing a subspace of codimension `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubspaceResult {
    /// Every basis element is divisible by `(X − x)^k`.
    FoundPoint(Rational),
    /// A k-free element of the span.
    KFreeWitness(QPoly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceAnalysis {
    /// Echelon basis of the span, ascending degree.
    pub basis: Vec<QPoly>,
    pub result: SubspaceResult,
}

/// Decides whether a codimension-`k` subspace of the degree-≤ n space over
/// `Q` consists of multiples of `(X − x)^k`, or returns a k-free element.
///
/// The echelon basis has a unique element of degree ≤ k. If every basis
/// element fails to be k-free, that element is `(X − x)^k`. Any basis element
/// `e` not divisible by it then yields a k-free `e + λ(X − x)^k` for some
/// `λ ∈ {0, …, max(deg e, k)}`.
pub fn analyze_codim_k_subspace(basis: &[QPoly], k: usize, n: usize) -> Result<SubspaceAnalysis> {
    check_k(k)?;
    if basis.iter().any(|b| b.degree().is_some_and(|d| d > n)) {
        return Err(Error::InvalidArgument(format!("basis element above degree {n}")));
    }
    let echelon = reduce_by_leading_monomial(basis);
    if echelon.len() != basis.len() {
        return Err(Error::InvalidArgument("basis is linearly dependent".into()));
    }
    if basis.len() + k != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected codimension {k} in degree {n} (dimension {}), got dimension {}",
            (n + 1).saturating_sub(k),
            basis.len()
        )));
    }
    let done = |result| SubspaceAnalysis {
        basis: echelon.clone(),
        result,
    };
    for e in &echelon {
        if k_free(e, k)? {
            return Ok(done(SubspaceResult::KFreeWitness(e.clone())));
        }
    }
    let g = &echelon[0];
    if g.degree() != Some(k) {
        return Err(Error::InvalidArgument(format!("span has no element of degree {k}")));
    }
    let x = -g.coeff(k - 1) / Rational::from_integer((k as i64).into());
    let power = QPoly::linear(RationalField, &x).pow(k as u32);
    debug_assert_eq!(g, &power);
    for e in &echelon {
        if power.divides(e) {
            continue;
        }
        let top = e.degree_or_zero().max(k) as i64;
        for l in 0..=top {
            let cand = e + &power.scalar_mul(&Rational::from_integer(l.into()));
            if k_free(&cand, k)? {
                return Ok(done(SubspaceResult::KFreeWitness(cand)));
            }
        }
        return Err(Error::Hypothesis(format!("no k-free member of the pencil through {e}")));
    }
    Ok(done(SubspaceResult::FoundPoint(x)))
}

/// Whether `target` lies in the span of `basis`.
pub fn in_span(basis: &[QPoly], target: &QPoly) -> bool {
    let before = reduce_by_leading_monomial(basis).len();
    let mut with = basis.to_vec();
    with.push(target.clone());
    reduce_by_leading_monomial(&with).len() == before
}

/// `true` when `q` is a nonzero rational multiple of `p`.
pub fn is_scalar_multiple(p: &QPoly, q: &QPoly) -> bool {
    match (p.leading_coeff(), q.leading_coeff()) {
        (Some(a), Some(b)) => p.scalar_mul(&(b / a)) == *q,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factor_over_q;
    use crate::field::{int, rat, QuadraticField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(c: &[i64]) -> QPoly {
        QPoly::from_ints(RationalField, c)
    }

    #[test]
    fn k_free_examples() {
        assert!(is_k_free(&q(&[-1, 0, 1]), 2).unwrap().is_k_free);
        let v = is_k_free(&(&q(&[-1, 1]).pow(2) * &q(&[2, 1])), 2).unwrap();
        assert!(!v.is_k_free);
        assert_eq!(v.witness_factor, Some(q(&[-1, 1])));
        let p = &q(&[1, 0, 1]).pow(3) * &q(&[-5, 1]);
        let v = is_k_free(&p, 3).unwrap();
        assert_eq!(v.witness_factor, Some(q(&[1, 0, 1])));
        assert!(is_k_free(&p, 4).unwrap().is_k_free);
        assert!(is_k_free(&QPoly::zero(RationalField), 2).is_err());
        assert!(is_k_free(&q(&[1]), 2).unwrap().is_k_free);
    }

    #[test]
    fn small_characteristic_rejected() {
        let f = PrimeField::new(3).unwrap();
        let p = Polynomial::new(f, vec![1, 0, 1]);
        assert!(matches!(
            is_k_free(&p, 3),
            Err(Error::CharacteristicTooSmall { characteristic: 3, k: 3 })
        ));
        assert!(is_k_free(&p, 2).unwrap().is_k_free);
        let f = PrimeField::new(5).unwrap();
        // (X − 1)²(X + 1)
        let p = Polynomial::new(f, vec![1, 4, 4, 1]);
        let v = is_k_free(&p, 2).unwrap();
        assert_eq!(v.witness_factor, Some(Polynomial::new(f, vec![4, 1])));
    }

    #[test]
    fn oracle_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut p = q(&[rng.gen_range(1..4)]);
            for _ in 0..rng.gen_range(1..4) {
                let f = if rng.gen_bool(0.6) {
                    q(&[rng.gen_range(-3..=3), 1])
                } else {
                    q(&[rng.gen_range(1..4), rng.gen_range(-2..=2), 1])
                };
                p = &p * &f.pow(rng.gen_range(1..=3));
            }
            if p.degree_or_zero() > 8 {
                continue;
            }
            for k in [2, 3] {
                let v = is_k_free(&p, k).unwrap();
                let oracle = factor_over_q(&p).unwrap().max_multiplicity() < k;
                assert_eq!(v.is_k_free, oracle, "{p}");
                if let Some(w) = v.witness_factor {
                    assert!(w.pow(k as u32).divides(&p));
                }
            }
        }
    }

    #[test]
    fn quadratic_field_boolean_only() {
        let f = QuadraticField::new(2).unwrap();
        let lin = Polynomial::linear(f, &f.sqrt_d());
        let p = &lin.pow(2) * &Polynomial::x(f);
        let v = is_k_free(&p, 2).unwrap();
        assert!(!v.is_k_free);
        assert!(v.witness_factor.is_none());
        assert_eq!(k_fold_roots(&p, 2).unwrap(), vec![f.sqrt_d()]);
    }

    #[test]
    fn k_fold_root_examples() {
        assert_eq!(k_fold_roots(&q(&[0, 0, 0, -1, 1]), 2).unwrap(), vec![int(0)]);
        let half = QPoly::linear(RationalField, &rat(1, 2)).pow(2);
        assert_eq!(k_fold_roots(&half, 2).unwrap(), vec![rat(1, 2)]);
        let p = &q(&[0, 0, 0, -1, 1]) * &q(&[2, 1]).pow(2);
        assert_eq!(k_fold_roots(&p, 1).unwrap(), vec![int(-2), int(0), int(1)]);
        assert_eq!(k_fold_roots(&p, 2).unwrap(), vec![int(-2), int(0)]);
        assert_eq!(k_fold_roots(&p, 3).unwrap(), vec![int(0)]);
        assert!(k_fold_roots(&p, 4).unwrap().is_empty());
    }

    #[test]
    fn tilde_p_examples() {
        let x = rat(2, 3);
        let pw = QPoly::linear(RationalField, &x).pow(3);
        assert!(tilde_p(&pw, &x, 3).unwrap().is_zero());
        assert_eq!(tilde_p(&q(&[1]), &x, 3).unwrap(), q(&[1]));
        let t = tilde_p(&q(&[0, 0, 1]), &int(0), 3).unwrap();
        assert_eq!(t, QPoly::monomial(RationalField, rat(1, 3), 2));
        let f = PrimeField::new(3).unwrap();
        assert!(tilde_p(&Polynomial::x(f), &0, 3).is_err());
    }

    #[test]
    fn lemma32_examples() {
        let x = int(1);
        let p = &QPoly::linear(RationalField, &x).pow(2) * &q(&[3, 1]);
        let ls: Vec<_> = (0..4).map(int).collect();
        assert!(lemma32_check(&p, &x, 2, &ls).unwrap());
        assert!(lemma32_check(&q(&[1]), &int(0), 2, &[int(0), int(1)]).unwrap());
        assert!(lemma32_check(&q(&[0, 1]), &int(0), 2, &[int(0)]).is_err());
        assert!(lemma32_check(&q(&[0, 1]), &int(0), 2, &[int(0), int(0)]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let c: Vec<i64> = (0..7).map(|_| rng.gen_range(-5..=5)).collect();
            let p = q(&c);
            let ls: Vec<_> = (0..7).map(|i| int(i * 3 - 7)).collect();
            if p.degree() == Some(6) {
                assert!(lemma32_check(&p, &int(rng.gen_range(-2..=2)), 2, &ls).unwrap());
            }
        }
    }

    #[test]
    fn charp_examples() {
        assert!(charp_identity_check(2, 1, 1, 1).unwrap());
        assert!(charp_identity_check(7, 1, 3, 0).unwrap());
        for p in [2, 3, 5] {
            for x in 0..p {
                for l in 0..p {
                    assert!(charp_identity_check(p, 1, x, l).unwrap());
                }
            }
        }
        assert!(charp_identity_check(3, 2, 2, 2).unwrap());
        assert!(charp_identity_check(4, 1, 0, 0).is_err());
        assert!(charp_identity_check(2, 20, 0, 0).is_err());
    }

    #[test]
    fn codim_k_examples() {
        let n = 7;
        let x = int(2);
        let pw = QPoly::linear(RationalField, &x).pow(2);
        let basis: Vec<_> = (0..=n - 2).map(|j| &pw * &q(&[0, 1]).pow(j as u32)).collect();
        let a = analyze_codim_k_subspace(&basis, 2, n).unwrap();
        assert_eq!(a.result, SubspaceResult::FoundPoint(x));

        let x = rat(1, 3);
        let pw = QPoly::linear(RationalField, &x).pow(3);
        let basis: Vec<_> = (0..=n - 3).map(|j| &pw * &q(&[0, 1]).pow(j as u32)).collect();
        let a = analyze_codim_k_subspace(&basis, 3, n).unwrap();
        assert_eq!(a.result, SubspaceResult::FoundPoint(x));

        let mut basis = vec![q(&[0, -1, 1])];
        basis.extend((3..=n).map(|j| QPoly::monomial(RationalField, int(1), j)));
        let a = analyze_codim_k_subspace(&basis, 2, n).unwrap();
        assert_eq!(a.result, SubspaceResult::KFreeWitness(q(&[0, -1, 1])));

        assert!(analyze_codim_k_subspace(&basis[1..], 2, n).is_err());
    }

    #[test]
    fn codim_k_perturbed_needs_pencil() {
        // Every basis element has a double root but the span is not (X − 1)²·Q[X].
        let n = 4;
        let a = QPoly::linear(RationalField, &int(1)).pow(2);
        let b = q(&[0, 0, 1]);
        let c = &q(&[0, 0, 1]) * &q(&[0, 1, 1]);
        let basis = vec![a, &b * &q(&[0, 1]), c];
        let res = analyze_codim_k_subspace(&basis, 2, n).unwrap();
        let SubspaceResult::KFreeWitness(w) = res.result else {
            panic!("expected witness");
        };
        assert!(k_free(&w, 2).unwrap());
        assert!(in_span(&basis, &w));
    }
}
