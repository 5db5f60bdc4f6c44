//! Roots in `Q` and `Q(√d)`, the coprime-pencil λ-search, and the
//! codimension-one subspace analyzer.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::{factor_over_q, rational_roots};
use crate::field::{Field, QuadElem, QuadraticField, Rational, RationalField};
use crate::linalg::reduce_by_leading_monomial;
use crate::poly::{Polynomial, QPoly};
use crate::trials::{first_hit, rationals_of_height, trial_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMethod {
    RationalRootTheorem,
    NormPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSearchReport<E> {
    /// Distinct roots in ascending order.
    pub roots: Vec<E>,
    pub method: RootMethod,
}

pub fn roots_in_q(p: &QPoly) -> Result<RootSearchReport<Rational>> {
    let roots = rational_roots(p)?.into_iter().map(|(r, _)| r).collect();
    Ok(RootSearchReport {
        roots,
        method: RootMethod::RationalRootTheorem,
    })
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Roots of `p` in `Q(√d)`.
///
/// The roots of `p` are among those of the norm `N = p · σ(p)`, which has
/// rational coefficients. Linear factors of `N` give rational candidates; a
/// quadratic factor `X² + sX + t` contributes `−s/2 ± (w/2)√d` when
/// `s² − 4t = d·w²`. Higher-degree factors have no roots of degree ≤ 2.
pub fn roots_in_quadratic(p: &Polynomial<QuadraticField>) -> Result<RootSearchReport<QuadElem>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let field = *p.field();
    let sq = p.squarefree_part()?;
    let norm = &sq * &field.apply_sigma(&sq);
    let norm_q = QPoly::new(
        RationalField,
        norm.coeffs().iter().map(|c| c.u.clone()).collect(),
    );
    debug_assert!(norm.coeffs().iter().all(QuadElem::is_rational));
    let mut candidates = Vec::new();
    if norm_q.degree_or_zero() > 0 {
        let d = Rational::from_integer(BigInt::from(field.d()));
        for (f, _) in factor_over_q(&norm_q.squarefree_part()?)?.factors {
            match f.degree() {
                Some(1) => candidates.push(QuadElem::rational(-f.coeff(0))),
                Some(2) => {
                    let (s, t) = (f.coeff(1), f.coeff(0));
                    let disc = &s * &s - Rational::from_integer(4.into()) * &t;
                    if let Some(w) = rational_sqrt(&(disc / &d)) {
                        let half = Rational::new(1.into(), 2.into());
                        let u = -&s * &half;
                        let v = w * &half;
                        candidates.push(QuadElem::new(u.clone(), v.clone()));
                        candidates.push(QuadElem::new(u, -v));
                    }
                }
                _ => {}
            }
        }
    }
    let mut roots: Vec<QuadElem> = candidates
        .into_iter()
        .filter(|z| field.is_zero(&p.evaluate(z)))
        .collect();
    roots.sort_by(|a, b| (&a.u, &a.v).cmp(&(&b.u, &b.v)));
    roots.dedup();
    Ok(RootSearchReport {
        roots,
        method: RootMethod::NormPolynomial,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaSearch {
    /// `P + λQ` has no rational root.
    Found(Rational),
    /// Every `λ` of height up to the bound left a rational root.
    Exhausted { height: u64 },
}

/// Searches `λ` by increasing height `|num| + den` for which `P + λQ` has no
/// rational root. Each height band is scanned in parallel and the first
/// candidate in enumeration order wins.
pub fn lemma42_lambda_search(p: &QPoly, q: &QPoly, height_bound: u64, threads: usize) -> Result<LambdaSearch> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !p.gcd(q)?.is_constant() {
        return Err(Error::Hypothesis("P and Q must be coprime".into()));
    }
    if p.degree_or_zero().max(q.degree_or_zero()) < 2 {
        return Err(Error::Hypothesis("one of P, Q must have degree at least 2".into()));
    }
    for h in 1..=height_bound {
        let band = rationals_of_height(h);
        let hit = first_hit(band.len() as u64, threads, |i| {
            let lambda = &band[i as usize];
            let r = p + &q.scalar_mul(lambda);
            let rootless = !r.is_zero() && rational_roots(&r).expect("nonzero").is_empty();
            rootless.then(|| lambda.clone())
        });
        if let Some((_, lambda)) = hit {
            return Ok(LambdaSearch::Found(lambda));
        }
    }
    Ok(LambdaSearch::Exhausted { height: height_bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Codim1Result {
    /// Every element of the span vanishes at this point.
    Point(Rational),
    /// An element of the span with no rational root.
    Witness(QPoly),
    /// Neither found within the search limits.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codim1Analysis {
    /// Echelon basis, ascending degree.
    pub basis: Vec<QPoly>,
    pub result: Codim1Result,
}

fn rootless_in_q(p: &QPoly) -> bool {
    !p.is_zero() && rational_roots(p).expect("nonzero").is_empty()
}

/// Decides whether a codimension-one subspace of the degree-≤ n space is
/// `(X − x)·Q[X]` truncated, or exhibits an element with no rational root.
///
/// The unique degree-≤ 1 element of the echelon basis pins down `x`. A basis
/// element `e` with `e(x) ≠ 0` is coprime to `X − x`, so some `e + λ(X − x)`
/// is rootless; `height` bounds that λ-search, after which `trials` seeded
/// random combinations of the whole basis are tried.
pub fn analyze_codim1_subspace(basis: &[QPoly], n: usize, height: u64, trials: u64, seed: u64) -> Result<Codim1Analysis> {
    if basis.iter().any(|b| b.degree().is_some_and(|d| d > n)) {
        return Err(Error::InvalidArgument(format!("basis element above degree {n}")));
    }
    let echelon = reduce_by_leading_monomial(basis);
    if echelon.len() != basis.len() {
        return Err(Error::InvalidArgument("basis is linearly dependent".into()));
    }
    if basis.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected codimension 1 (dimension {n}), got dimension {}",
            basis.len()
        )));
    }
    let done = |result| Codim1Analysis {
        basis: echelon.clone(),
        result,
    };
    // The lowest element has degree ≤ 1: a nonzero constant is itself
    // rootless, otherwise it is X − x.
    let line = &echelon[0];
    if line.is_constant() {
        return Ok(done(Codim1Result::Witness(line.clone())));
    }
    if line.degree() != Some(1) {
        return Err(Error::InvalidArgument("span has no element of degree 1".into()));
    }
    let x = -line.coeff(0);
    let Some(off) = echelon.iter().find(|e| !e.evaluate(&x).is_zero()) else {
        return Ok(done(Codim1Result::Point(x)));
    };
    if off.degree_or_zero() >= 2 {
        if let LambdaSearch::Found(l) = lemma42_lambda_search(off, line, height, 1)? {
            return Ok(done(Codim1Result::Witness(off + &line.scalar_mul(&l))));
        }
    }
    let random = first_hit(trials, 1, |i| {
        let mut rng = trial_rng(seed, i);
        let combo = echelon.iter().fold(QPoly::zero(RationalField), |acc, e| {
            let c = Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=5).into());
            &acc + &e.scalar_mul(&c)
        });
        rootless_in_q(&combo).then_some(combo)
    });
    Ok(done(match random {
        Some((_, w)) => Codim1Result::Witness(w),
        None => Codim1Result::Inconclusive,
    }))
}
