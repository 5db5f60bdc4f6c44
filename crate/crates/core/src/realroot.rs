//! Exact real-root analysis over `Q`.
//!
//! Everything rests on [`SturmSequence`], which counts distinct real roots
//! with exact rational sign evaluations. On top of it sit the sets
//! `V(P, Q) = {λ : P − λQ has a real root}` and
//! `S(P) = {Q : V(Q, P) is bounded}`, nonnegativity and image tests, and the
//! double-root characterizations used to show real-root preservers are affine.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::squarefree_decomposition;
use crate::field::{int, random_rational, Rational, RationalField};
use crate::poly::QPoly;
use crate::trials::{first_hit, rationals_of_height, trial_rng};

/// Signed remainder chain `p0 = sqfree(P)`, `p1 = p0'`, `p_{i+1} = −rem(p_{i−1}, p_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmSequence {
    chain: Vec<QPoly>,
}

impl SturmSequence {
    pub fn new(p: &QPoly) -> Result<Self> {
        let p0 = p.squarefree_part()?;
        let mut chain = vec![p0.clone()];
        if p0.is_constant() {
            return Ok(SturmSequence { chain });
        }
        let mut prev = p0;
        let mut cur = prev.derivative();
        while !cur.is_zero() {
            let next = -prev.rem(&cur)?;
            chain.push(cur.clone());
            prev = cur;
            cur = next;
        }
        Ok(SturmSequence { chain })
    }

    pub fn chain(&self) -> &[QPoly] {
        &self.chain
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations_at(&self, x: &Rational) -> usize {
        count_variations(self.chain.iter().map(|p| p.evaluate(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.chain.iter().map(|p| {
            let lc = p.leading_coeff().unwrap().clone();
            if positive || p.degree_or_zero() % 2 == 0 {
                lc
            } else {
                -lc
            }
        }))
    }

    /// Distinct roots in the half-open interval `(lo, hi]`.
    ///
    /// Valid even when an endpoint is a root: at a simple root `r` of the
    /// squarefree head, dropping the zero gives the same variation count as
    /// just right of `r`.
    pub fn count_half_open(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }

    /// Distinct roots in the closed interval `[lo, hi]`.
    pub fn count_closed(&self, lo: &Rational, hi: &Rational) -> usize {
        let at_lo = usize::from(self.chain[0].evaluate(lo).is_zero());
        self.count_half_open(lo, hi) + at_lo
    }

    /// Distinct real roots on the whole line, bracketed by the Cauchy bound.
    pub fn count_all(&self) -> usize {
        let b = cauchy_bound(&self.chain[0]);
        self.count_closed(&-&b, &b)
    }

    /// The same count from the sign pattern at ±∞; a cross-check.
    pub fn count_all_at_infinity(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

fn count_variations(values: impl Iterator<Item = Rational>) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if last.is_some_and(|l| l != s) {
            n += 1;
        }
        last = Some(s);
    }
    n
}

/// `1 + max_{i<n} |a_i / a_n|`; every real root lies strictly inside.
pub fn cauchy_bound(p: &QPoly) -> Rational {
    let Some(lc) = p.leading_coeff() else {
        return Rational::one();
    };
    let n = p.degree_or_zero();
    let m = p.coeffs()[..n]
        .iter()
        .map(|c| (c / lc).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Number of distinct real roots of `p`, on the whole line or in the closed
/// interval `[lo, hi]`.
pub fn count_real_roots(p: &QPoly, interval: Option<(&Rational, &Rational)>) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let s = SturmSequence::new(p)?;
    match interval {
        None => Ok(s.count_all()),
        Some((lo, hi)) => {
            if lo >= hi {
                return Err(Error::InvalidArgument("interval requires lo < hi".into()));
            }
            Ok(s.count_closed(lo, hi))
        }
    }
}

pub fn has_real_root(p: &QPoly) -> Result<bool> {
    Ok(count_real_roots(p, None)? > 0)
}

pub fn has_common_real_root(p: &QPoly, q: &QPoly) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    has_real_root(&p.gcd(q)?)
}

/// Whether `λ ∈ V(P, Q)`, i.e. `P − λQ` has a real root (the zero
/// polynomial counts as having one).
pub fn v_contains(p: &QPoly, q: &QPoly, lambda: &Rational) -> bool {
    let r = p - &q.scalar_mul(lambda);
    r.is_zero() || has_real_root(&r).expect("nonzero")
}

/// Whether `Q ∈ S(P)`: `P` has no real root and `deg Q ≤ deg P`.
pub fn s_membership(q: &QPoly, p: &QPoly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(!has_real_root(p)? && q.degree() <= p.degree())
}

/// A rational `M` with `V(Q, P) ⊆ (−M, M)`, found by doubling.
///
/// When `P` has no real root, `V(Q, P)` is the image of the continuous
/// function `Q/P` on the line, hence an interval; so `±M ∉ V` together with
/// one interior member certifies the bound. Returns `None` when `P` has a real
/// root or no power of two up to `2^max_doublings` works.
pub fn s_boundedness_certificate(q: &QPoly, p: &QPoly, max_doublings: u32) -> Result<Option<Rational>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if has_real_root(p)? {
        return Ok(None);
    }
    let inside = q.evaluate(&Rational::zero()) / p.evaluate(&Rational::zero());
    let mut m = Rational::one();
    for _ in 0..=max_doublings {
        if inside.abs() < m && !v_contains(q, p, &m) && !v_contains(q, p, &-&m) {
            return Ok(Some(m));
        }
        m *= int(2);
    }
    Ok(None)
}

/// Whether `p(t) ≥ 0` for every real `t`.
pub fn is_nonnegative(p: &QPoly) -> bool {
    let Some(deg) = p.degree() else {
        return true;
    };
    if !p.leading_coeff().unwrap().is_positive() || deg % 2 == 1 {
        return false;
    }
    squarefree_decomposition(p)
        .expect("nonzero, characteristic zero")
        .iter()
        .filter(|(_, m)| m % 2 == 1)
        .all(|(part, _)| !has_real_root(part).expect("nonzero"))
}

/// Whether the image of `p` over the reals is exactly `[0, ∞)`.
pub fn image_is_r_plus(p: &QPoly) -> bool {
    p.degree().is_some_and(|d| d >= 1) && is_nonnegative(p) && has_real_root(p).expect("nonzero")
}

/// Shape of the image of a real polynomial function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageClassification {
    /// Constant polynomials take a single value.
    Constant(Rational),
    /// Odd degree.
    AllReals,
    /// Even positive degree: `[m, ∞)` when `upward`, `(−∞, m]` otherwise.
    HalfLine { upward: bool, attains_zero: bool },
}

pub fn classify_image(p: &QPoly) -> ImageClassification {
    match p.degree() {
        None => ImageClassification::Constant(Rational::zero()),
        Some(0) => ImageClassification::Constant(p.coeff(0)),
        Some(d) if d % 2 == 1 => ImageClassification::AllReals,
        Some(_) => ImageClassification::HalfLine {
            upward: p.leading_coeff().unwrap().is_positive(),
            attains_zero: has_real_root(p).expect("nonzero"),
        },
    }
}

fn double_root_factor(x: &Rational) -> QPoly {
    QPoly::linear(RationalField, x).pow(2)
}

fn abs_coeff_sum(p: &QPoly) -> Rational {
    p.coeffs().iter().map(|c| c.abs()).sum()
}

/// Outcome of the even-degree double-root characterization on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma54Report {
    /// `(X − x)²` divides `P`.
    pub lhs: bool,
    /// `P + λ(X − x)²` has image `[0, ∞)` for every probed `λ = j·λ*`.
    pub rhs: bool,
    pub lambda_star: Rational,
    pub probed: Vec<Rational>,
}

/// Checks that `x` is a double root of `P` exactly when adding a large
/// multiple of `(X − x)²` makes the image `[0, ∞)`.
///
/// With `P = (X − x)² T + R` (Euclidean division), the clearance is
/// `λ* = 1 + Σ|t_i| (1 + B)^deg T` where `B` is the Cauchy bound of `T`; when
/// `R = 0` it forces `T + λ ≥ 1` on the line for `λ ≥ λ*`. The probes are
/// `λ*, 2λ*, …, (deg P + 1)λ*`: that many non-2-free members of the pencil
/// forces `(X − x)² | P`, so `rhs` is decided on a set large enough for the
/// converse direction too.
pub fn lemma54_check(p: &QPoly, x: &Rational) -> Result<Lemma54Report> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg % 2 == 1 || !p.leading_coeff().unwrap().is_positive() {
        return Err(Error::Hypothesis(
            "P must have even degree and positive leading coefficient".into(),
        ));
    }
    let sq = double_root_factor(x);
    let (t, r) = p.euclid_div(&sq)?;
    let lhs = r.is_zero();
    let b = cauchy_bound(&t);
    let clearance = abs_coeff_sum(&t) * num_traits::pow(Rational::one() + b, t.degree_or_zero());
    let lambda_star = Rational::one() + clearance;
    let probed: Vec<Rational> = (1..=deg as i64 + 1).map(|j| &lambda_star * int(j)).collect();
    let rhs = probed
        .iter()
        .all(|l| image_is_r_plus(&(p + &sq.scalar_mul(l))));
    Ok(Lemma54Report {
        lhs,
        rhs,
        lambda_star,
        probed,
    })
}

/// Writes a polynomial with double root `x` as `P1 − P2`, both of even degree
/// with positive leading coefficient and double root `x`. The zero polynomial
/// is admitted as `P2` (or `P1`), for which those conditions are vacuous.
pub fn lemma55_decompose(p: &QPoly, x: &Rational) -> Result<(QPoly, QPoly)> {
    let sq = double_root_factor(x);
    if !sq.divides(p) {
        return Err(Error::Hypothesis(format!(
            "{} is not a double root of {p}",
            crate::field::fmt_rational(x)
        )));
    }
    let zero = QPoly::zero(RationalField);
    let Some(n) = p.degree() else {
        return Ok((sq.clone(), sq));
    };
    if n % 2 == 0 {
        if p.leading_coeff().unwrap().is_positive() {
            Ok((p.clone(), zero))
        } else {
            Ok((zero, -p))
        }
    } else {
        let lift = QPoly::linear(RationalField, x).pow(n as u32 + 1);
        Ok((&lift + p, lift))
    }
}

fn require_quadratic(p: &QPoly) -> Result<()> {
    if p.degree() != Some(2) {
        return Err(Error::InvalidArgument("P must have degree 2".into()));
    }
    Ok(())
}

/// Whether `P + b(X − x) + c` has a real root exactly when `b² ≥ 4c`.
fn lemma53_agrees(p: &QPoly, x: &Rational, b: &Rational, c: &Rational) -> bool {
    let shift = &QPoly::linear(RationalField, x).scalar_mul(b) + &QPoly::constant(RationalField, c.clone());
    let has_root = has_real_root(&(p + &shift)).expect("degree 2");
    has_root == (b * b >= int(4) * c)
}

/// Whether the biconditional `[P + b(X − x) + c has a real root] ⇔ b² ≥ 4c`
/// holds at every grid point. It holds on every grid iff `P = (X − x)²`.
pub fn lemma53_probe(p: &QPoly, x: &Rational, grid: &[(Rational, Rational)]) -> Result<bool> {
    require_quadratic(p)?;
    Ok(grid.iter().all(|(b, c)| lemma53_agrees(p, x, b, c)))
}

/// Searches `(b, c)` by increasing sum-height for a point violating the
/// biconditional. For `P ≠ (X − x)²` the violating set has interior, so the
/// search terminates once the height is large enough.
pub fn lemma53_witness(p: &QPoly, x: &Rational, max_height: u64) -> Result<Option<(Rational, Rational)>> {
    require_quadratic(p)?;
    let mut seen: Vec<Rational> = Vec::new();
    for h in 1..=max_height {
        let fresh = rationals_of_height(h);
        seen.extend(fresh.iter().cloned());
        // Pairs whose larger height is exactly h.
        for b in &seen {
            for c in &seen {
                if !fresh.contains(b) && !fresh.contains(c) {
                    continue;
                }
                if !lemma53_agrees(p, x, b, c) {
                    return Ok(Some((b.clone(), c.clone())));
                }
            }
        }
    }
    Ok(None)
}

/// `X, X² − 1, X³, X⁴ − 1, …` up to degree `n`: the polynomials with
/// `P(1) + P(−1) = 0`.
pub fn moment_basis(n: usize) -> Vec<QPoly> {
    (1..=n)
        .map(|i| {
            let mono = QPoly::monomial(RationalField, Rational::one(), i);
            if i % 2 == 0 {
                &mono - &QPoly::one(RationalField)
            } else {
                mono
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentReport {
    pub trials: u64,
    /// Smallest failing trial index and the polynomial without a real root.
    pub witness: Option<(u64, QPoly)>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Samples random rational combinations of [`moment_basis`] and checks that
/// each one vanishes somewhere on the line.
pub fn moment_subspace_demo(n: usize, trials: u64, seed: u64, threads: usize) -> Result<MomentReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("degree bound must be at least 2".into()));
    }
    let basis = moment_basis(n);
    let witness = first_hit(trials, threads, |i| {
        let mut rng = trial_rng(seed, i);
        let p = basis.iter().fold(QPoly::zero(RationalField), |acc, b| {
            let c = if rng.gen_bool(0.2) {
                Rational::zero()
            } else {
                random_rational(&mut rng, 10)
            };
            &acc + &b.scalar_mul(&c)
        });
        let balanced = (p.evaluate(&int(1)) + p.evaluate(&int(-1))).is_zero();
        let ok = balanced && (p.is_zero() || has_real_root(&p).expect("nonzero"));
        (!ok).then_some(p)
    });
    Ok(MomentReport { trials, witness })
}
