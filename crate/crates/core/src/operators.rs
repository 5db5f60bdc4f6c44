//! Differential operators on `K[X]`: the antiderivative, the Wronskian and its
//! derivative expansions, and the maps `f̃` and `h_Q` with their identities.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::field::{Field, Rational, RationalField};
use crate::linalg::Matrix;
use crate::poly::{Polynomial, QPoly};
use crate::trials::trial_rng;

fn require_char_zero<F: Field>(field: &F) -> Result<()> {
    if field.characteristic() != 0 {
        return Err(Error::PositiveCharacteristic);
    }
    Ok(())
}

/// `∫P`, the antiderivative vanishing at 0, applied `times` times.
pub fn antiderivative<F: Field>(p: &Polynomial<F>, times: usize) -> Result<Polynomial<F>> {
    let f = p.field();
    require_char_zero(f)?;
    let mut cur = p.clone();
    for _ in 0..times {
        if cur.is_zero() {
            break;
        }
        let mut coeffs = vec![f.zero()];
        for (i, c) in cur.coeffs().iter().enumerate() {
            let inv = f.inv(&f.from_int(i as i64 + 1)).expect("characteristic zero");
            coeffs.push(f.mul(c, &inv));
        }
        cur = Polynomial::new(f.clone(), coeffs);
    }
    Ok(cur)
}

/// `PQ′ − P′Q`.
pub fn wronskian<F: Field>(p: &Polynomial<F>, q: &Polynomial<F>) -> Polynomial<F> {
    &(p * &q.derivative()) - &(&p.derivative() * q)
}

/// `det(P^(i), Q^(i); P^(j), Q^(j)) = P^(i) Q^(j) − Q^(i) P^(j)`.
fn derivative_det<F: Field>(p: &Polynomial<F>, q: &Polynomial<F>, i: usize, j: usize) -> Polynomial<F> {
    &(&p.nth_derivative(i) * &q.nth_derivative(j)) - &(&q.nth_derivative(i) * &p.nth_derivative(j))
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn big_to_elem<F: Field>(field: &F, n: &BigInt) -> F::Elem {
    field
        .from_rational(&Rational::from_integer(n.clone()))
        .expect("integers embed in every field")
}

/// `Σ_{i=0}^{n} (n choose i) det(P^(i), Q^(i); P^(n+1−i), Q^(n+1−i))`, which
/// is the n-th derivative of the Wronskian.
pub fn wronskian_nth_derivative_binomial<F: Field>(p: &Polynomial<F>, q: &Polynomial<F>, n: usize) -> Polynomial<F> {
    let f = p.field();
    (0..=n).fold(Polynomial::zero(f.clone()), |acc, i| {
        let c = big_to_elem(f, &binomial(n, i));
        &acc + &derivative_det(p, q, i, n + 1 - i).scalar_mul(&c)
    })
}

/// Coefficients of the shortened expansion
/// `W^(n) = Σ_{i ≤ ⌈n/2⌉} C(n−i, i) det(P^(i), Q^(i); P^(n+1−i), Q^(n+1−i))`.
///
/// The coefficients are found by solving against the binomial expansion and
/// turn out to be the Catalan triangle `C(a, b) = (a−b+1)/(a+1)·(a+b choose b)`,
/// with `C(m, m)` the Catalan numbers. For odd `n` the top index has
/// `i = n+1−i`, where the determinant vanishes; its entry is recorded as
/// `C(m, m+1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalanTriangle {
    /// `rows[n][i]` is the coefficient of the `i`-th determinant in `W^(n)`.
    rows: Vec<Vec<BigInt>>,
}

impl CatalanTriangle {
    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Coefficient of `det(P^(i), Q^(i); P^(n+1−i), Q^(n+1−i))` in `W^(n)`.
    pub fn coefficient(&self, n: usize, i: usize) -> Option<&BigInt> {
        self.rows.get(n)?.get(i)
    }

    /// The triangle entry `C(a, b)`, stored as the coefficient for `n = a + b`, `i = b`.
    pub fn entry(&self, a: usize, b: usize) -> Option<&BigInt> {
        self.coefficient(a + b, b)
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }
}

/// Largest `n` accepted by [`derive_catalan_coefficients`].
pub const CATALAN_MAX_N: usize = 12;

fn falling(a: usize, i: usize) -> BigInt {
    (0..i).fold(BigInt::one(), |acc, t| acc * BigInt::from(a as i64 - t as i64))
}

/// Solves for the shortened-expansion coefficients for every `n ≤ n_max`.
///
/// For monomials `P = X^a`, `Q = X^b` every determinant is a multiple of the
/// single monomial `X^{a+b−n−1}`, so each pair contributes one linear equation.
/// Pairs `(X^{n+2}, X^{n+2+j})` give a square system plus one extra equation
/// that checks consistency.
pub fn derive_catalan_coefficients(n_max: usize) -> Result<CatalanTriangle> {
    if n_max > CATALAN_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n_max must be at most {CATALAN_MAX_N}, got {n_max}"
        )));
    }
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // Indices with i < n+1−i; at i = n+1−i the determinant is zero.
        let unknowns = n / 2 + 1;
        let a = n + 2;
        let det_coeff = |b: usize, i: usize| -> BigInt {
            falling(a, i) * falling(b, n + 1 - i) - falling(b, i) * falling(a, n + 1 - i)
        };
        let eqs: Vec<usize> = (1..=unknowns + 1).map(|j| a + j).collect();
        let columns: Vec<Vec<Rational>> = (0..unknowns)
            .map(|i| eqs.iter().map(|&b| Rational::from_integer(det_coeff(b, i))).collect())
            .collect();
        // Target: the n-th derivative of the Wronskian of X^a, X^b.
        let rhs: Vec<Rational> = eqs
            .iter()
            .map(|&b| {
                let w = wronskian(
                    &QPoly::monomial(RationalField, Rational::one(), a),
                    &QPoly::monomial(RationalField, Rational::one(), b),
                );
                w.nth_derivative(n).coeff(a + b - n - 1)
            })
            .collect();
        let m = Matrix::from_columns(RationalField, columns)?;
        if m.rank() != unknowns {
            return Err(Error::Singular(format!("coefficient system for n = {n} is underdetermined")));
        }
        let sol = m
            .solve(&rhs)?
            .ok_or_else(|| Error::Singular(format!("coefficient system for n = {n} is inconsistent")))?;
        let mut row = Vec::with_capacity(n.div_ceil(2) + 1);
        for c in sol {
            if !c.is_integer() {
                return Err(Error::Singular(format!("non-integral coefficient for n = {n}")));
            }
            row.push(c.to_integer());
        }
        if n % 2 == 1 {
            row.push(BigInt::zero());
        }
        rows.push(row);
    }
    Ok(CatalanTriangle { rows })
}

/// The shortened expansion of `W^(n)` using a derived coefficient table.
pub fn wronskian_nth_derivative_catalan<F: Field>(
    p: &Polynomial<F>,
    q: &Polynomial<F>,
    n: usize,
    table: &CatalanTriangle,
) -> Result<Polynomial<F>> {
    let row = table
        .rows
        .get(n)
        .ok_or_else(|| Error::InvalidArgument(format!("coefficient table only reaches n = {}", table.max_n())))?;
    let f = p.field();
    Ok(row.iter().enumerate().fold(Polynomial::zero(f.clone()), |acc, (i, c)| {
        &acc + &derivative_det(p, q, i, n + 1 - i).scalar_mul(&big_to_elem(f, c))
    }))
}

/// Both sides of the pencil criterion at `x`: `lhs` says `x` is a
/// `(k−1)`-fold root of `PQ′ − P′Q`; `rhs` says the jets
/// `(P(x), …, P^(k−1)(x))` and `(Q(x), …, Q^(k−1)(x))` are colinear, i.e.
/// some nontrivial `λP + μQ` has `x` as a k-fold root.
pub fn lemma35_forward_and_back<F: Field>(
    p: &Polynomial<F>,
    q: &Polynomial<F>,
    x: &F::Elem,
    k: usize,
) -> Result<(bool, bool)> {
    let f = p.field();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let ch = f.characteristic();
    if ch != 0 && ch < k as u64 {
        return Err(Error::CharacteristicTooSmall { characteristic: ch, k });
    }
    if f.is_zero(&p.evaluate(x)) && f.is_zero(&q.evaluate(x)) {
        return Err(Error::Hypothesis(format!("P and Q both vanish at {}", f.format(x))));
    }
    let w = wronskian(p, q);
    let lhs = w.is_zero() || w.root_multiplicity(x) >= k - 1;
    let jet = |poly: &Polynomial<F>| -> Vec<F::Elem> {
        (0..k).map(|j| poly.nth_derivative(j).evaluate(x)).collect()
    };
    let (jp, jq) = (jet(p), jet(q));
    let columns = (0..k).map(|j| vec![jp[j].clone(), jq[j].clone()]).collect();
    let rhs = Matrix::from_columns(f.clone(), columns)?.rank() <= 1;
    Ok((lhs, rhs))
}

/// A linear map on polynomials, possibly defined only up to some degree.
pub trait LinearPolyMap<F: Field> {
    fn apply(&self, p: &Polynomial<F>) -> Result<Polynomial<F>>;
}

/// Wraps a closure as a [`LinearPolyMap`]; linearity is the caller's promise.
pub struct FnMap<G>(pub G);

impl<F: Field, G> LinearPolyMap<F> for FnMap<G>
where
    G: Fn(&Polynomial<F>) -> Result<Polynomial<F>>,
{
    fn apply(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        (self.0)(p)
    }
}

/// `f̃(P) = f(1)·f(∫P)′ − f(1)′·f(∫P)`.
pub fn tilde_f<F: Field, M: LinearPolyMap<F> + ?Sized>(f: &M, p: &Polynomial<F>) -> Result<Polynomial<F>> {
    let one = f.apply(&Polynomial::one(p.field().clone()))?;
    let image = f.apply(&antiderivative(p, 1)?)?;
    Ok(wronskian(&one, &image))
}

/// `h_Q(P) = F·[QP − Q′(∫P) + Q″(∫²P) − …]` with `F = f(1)`; the sum stops
/// at `i = deg Q`.
pub fn h_q<F: Field>(f_one: &Polynomial<F>, q: &Polynomial<F>, p: &Polynomial<F>) -> Result<Polynomial<F>> {
    let field = p.field();
    require_char_zero(field)?;
    let mut sum = Polynomial::zero(field.clone());
    let mut dq = q.clone();
    let mut ip = p.clone();
    let mut sign = true;
    while !dq.is_zero() {
        let term = &dq * &ip;
        sum = if sign { &sum + &term } else { &sum - &term };
        dq = dq.derivative();
        ip = antiderivative(&ip, 1)?;
        sign = !sign;
    }
    Ok(f_one * &sum)
}

/// `F·h_Q(P)′ − F′·h_Q(P) = F²·Q·P′`.
pub fn hq_identity_check<F: Field>(f_one: &Polynomial<F>, q: &Polynomial<F>, p: &Polynomial<F>) -> Result<bool> {
    let h = h_q(f_one, q, p)?;
    Ok(wronskian(f_one, &h) == &(&f_one.pow(2) * q) * &p.derivative())
}

/// Data of the reduction step: `f̃(1) = Q·f(1)² + R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigGData<F: Field> {
    pub q: Polynomial<F>,
    pub r: Polynomial<F>,
}

/// Splits `f̃(1)` by `f(1)²` and checks `f(1)·g(P)′ − f(1)′·g(P) = R·P′` for
/// `g = f − h_Q` at each probe. The identity is expected for maps satisfying
/// `f(1)·f(P)′ − f(1)′·f(P) = f̃(1)·P′`.
pub fn big_g_check<F: Field, M: LinearPolyMap<F> + ?Sized>(f: &M, probes: &[Polynomial<F>]) -> Result<(BigGData<F>, bool)> {
    let field = match probes.first() {
        Some(p) => p.field().clone(),
        None => return Err(Error::InvalidArgument("no probe polynomials".into())),
    };
    let f_one = f.apply(&Polynomial::one(field.clone()))?;
    if f_one.is_zero() {
        return Err(Error::Hypothesis("f(1) is zero".into()));
    }
    let tf_one = tilde_f(f, &Polynomial::one(field))?;
    let (q, r) = tf_one.euclid_div(&f_one.pow(2))?;
    let mut ok = true;
    for p in probes {
        let g = &f.apply(p)? - &h_q(&f_one, &q, p)?;
        if wronskian(&f_one, &g) != &r * &p.derivative() {
            ok = false;
            break;
        }
    }
    Ok((BigGData { q, r }, ok))
}

/// Spot-checks additivity and homogeneity on random inputs of degree ≤ n.
pub fn linearity_spot_check<F: Field, M: LinearPolyMap<F> + ?Sized>(
    f: &M,
    field: &F,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<bool> {
    let random_poly = |rng: &mut dyn RngCore| {
        Polynomial::new(field.clone(), (0..=n).map(|_| field.random_elem(rng, 8)).collect())
    };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let (a, b) = (field.random_elem(&mut rng, 8), field.random_elem(&mut rng, 8));
        let lhs = f.apply(&(&p.scalar_mul(&a) + &q.scalar_mul(&b)))?;
        let rhs = &f.apply(&p)?.scalar_mul(&a) + &f.apply(&q)?.scalar_mul(&b);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
