//! Rational roots, squarefree decomposition and Kronecker factorization over `Q`.
//!
//! Kronecker's method is exponential; it backs the independent k-freeness
//! oracle and is capped at [`KRONECKER_DEGREE_CAP`].

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Rational, RationalField};
use crate::poly::{Polynomial, QPoly};
use crate::realroot::SturmSequence;

pub const KRONECKER_DEGREE_CAP: usize = 12;

/// Coefficients up to this magnitude use rational-root-theorem divisor
/// enumeration; larger ones go through Sturm bisection on integer roots.
const DIVISOR_ENUMERATION_LIMIT: u64 = 1_000_000_000_000;

/// `lc · ∏ factor^multiplicity`, factors monic and irreducible over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(QPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> QPoly {
        self.factors.iter().fold(
            QPoly::constant(RationalField, self.unit.clone()),
            |acc, (f, m)| &acc * &f.pow(*m as u32),
        )
    }

    pub fn max_multiplicity(&self) -> usize {
        self.factors.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }
}

/// Scales `p` to a primitive integer polynomial with positive leading coefficient.
pub fn primitive_integer_part(p: &QPoly) -> Vec<BigInt> {
    if p.is_zero() {
        return Vec::new();
    }
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().unwrap().is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for c in &mut ints {
        *c = &*c / &content * &sign;
    }
    ints
}

fn int_poly(coeffs: &[BigInt]) -> QPoly {
    QPoly::new(
        RationalField,
        coeffs.iter().cloned().map(Rational::from_integer).collect(),
    )
}

fn eval_int(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Positive divisors of `n > 0` by trial division.
fn divisors(n: u128) -> Vec<u128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// All rational roots of `p` with exact multiplicities, ascending.
pub fn rational_roots(p: &QPoly) -> Result<Vec<(Rational, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sqf = p.squarefree_part()?;
    let roots = distinct_rational_roots(&sqf);
    Ok(roots
        .into_iter()
        .map(|r| {
            let m = p.root_multiplicity(&r);
            (r, m)
        })
        .collect())
}

fn distinct_rational_roots(p: &QPoly) -> Vec<Rational> {
    let mut f = primitive_integer_part(p);
    let mut roots = BTreeSet::new();
    if f.len() <= 1 {
        return Vec::new();
    }
    if f[0].is_zero() {
        roots.insert(Rational::zero());
        while f.first().is_some_and(|c| c.is_zero()) {
            f.remove(0);
        }
    }
    if f.len() > 1 {
        let small = |c: &BigInt| c.abs().to_u64().is_some_and(|v| v <= DIVISOR_ENUMERATION_LIMIT);
        let found = if small(&f[0]) && small(f.last().unwrap()) {
            roots_by_divisors(&f)
        } else {
            roots_by_bisection(&f)
        };
        roots.extend(found);
    }
    roots.into_iter().collect()
}

/// Rational root theorem: candidates `±r/s` with `r | f(0)` and `s | lc`.
fn roots_by_divisors(f: &[BigInt]) -> Vec<Rational> {
    let a0 = f[0].abs().to_u128().unwrap();
    let an = f.last().unwrap().abs().to_u128().unwrap();
    let n = f.len() - 1;
    let mut out = Vec::new();
    let dens = divisors(an);
    for r in divisors(a0) {
        for s in &dens {
            if r.gcd(s) != 1 {
                continue;
            }
            for sign in [1i8, -1] {
                let num = BigInt::from(r) * sign;
                let den = BigInt::from(*s);
                // Σ f_i num^i den^(n−i)
                let mut acc = BigInt::zero();
                let mut num_pow = BigInt::one();
                let mut den_pows = vec![BigInt::one(); n + 1];
                for i in 1..=n {
                    den_pows[i] = &den_pows[i - 1] * &den;
                }
                for (i, c) in f.iter().enumerate() {
                    acc += c * &num_pow * &den_pows[n - i];
                    num_pow *= &num;
                }
                if acc.is_zero() {
                    out.push(Rational::new(num, den));
                }
            }
        }
    }
    out
}

/// Roots `r` of `f` correspond to integer roots `lc·r` of the monic
/// `g(Y) = lc^(n−1) f(Y / lc)`; those are isolated with a Sturm chain.
fn roots_by_bisection(f: &[BigInt]) -> Vec<Rational> {
    let n = f.len() - 1;
    let lc = f[n].clone();
    let mut g = Vec::with_capacity(n + 1);
    let mut scale = BigInt::one();
    for i in (0..n).rev() {
        g.push((i, &f[i] * &scale));
        scale *= &lc;
    }
    let mut gc = vec![BigInt::zero(); n + 1];
    for (i, c) in g {
        gc[i] = c;
    }
    gc[n] = BigInt::one();
    let bound: BigInt = gc.iter().take(n).map(|c| c.abs()).max().unwrap_or_default() + 1;
    let g_poly = int_poly(&gc);
    let sturm = SturmSequence::new(&g_poly).expect("nonzero");
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let count = sturm.count_half_open(
            &Rational::from_integer(lo.clone()),
            &Rational::from_integer(hi.clone()),
        );
        if count == 0 {
            continue;
        }
        if &hi - &lo == BigInt::one() {
            if eval_int(&gc, &hi).is_zero() {
                out.push(Rational::new(hi, lc.clone()));
            }
            continue;
        }
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out
}

/// Yun's squarefree decomposition of a nonzero polynomial in characteristic
/// zero: pairs `(a_i, i)` with `monic(P) = ∏ a_i^i`, `a_i` squarefree and
/// pairwise coprime. Trivial parts are omitted.
pub fn squarefree_decomposition<F: Field>(p: &Polynomial<F>) -> Result<Vec<(Polynomial<F>, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.field().characteristic() != 0 {
        return Err(Error::PositiveCharacteristic);
    }
    let f = p.monic();
    let mut out = Vec::new();
    if f.is_constant() {
        return Ok(out);
    }
    let df = f.derivative();
    let a0 = f.gcd(&df)?;
    let mut b = f.exact_div(&a0).expect("gcd divides");
    let c = df.exact_div(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d)?;
        let next_b = b.exact_div(&a).expect("gcd divides");
        let next_c = d.exact_div(&a).expect("gcd divides");
        if !a.is_constant() {
            out.push((a, i));
        }
        d = &next_c - &next_b.derivative();
        b = next_b;
        i += 1;
    }
    Ok(out)
}

/// Complete factorization over `Q` into monic irreducibles.
pub fn factor_over_q(p: &QPoly) -> Result<Factorization> {
    factor_over_q_capped(p, KRONECKER_DEGREE_CAP)
}

pub fn factor_over_q_capped(p: &QPoly, cap: usize) -> Result<Factorization> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg > cap {
        return Err(Error::DegreeCap { degree: deg, cap });
    }
    let unit = p.leading_coeff().unwrap().clone();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(p)? {
        for f in factor_squarefree(&part)? {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|(a, ma), (b, mb)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
            .then(ma.cmp(mb))
    });
    Ok(Factorization { unit, factors })
}

/// Irreducible factors of a squarefree polynomial, monic.
fn factor_squarefree(p: &QPoly) -> Result<Vec<QPoly>> {
    let mut out = Vec::new();
    let mut rest = p.monic();
    for r in distinct_rational_roots(&rest) {
        let lin = QPoly::linear(RationalField, &r);
        rest = rest.exact_div(&lin).expect("root divides");
        out.push(lin);
    }
    let mut stack = vec![rest];
    while let Some(f) = stack.pop() {
        if f.is_constant() {
            continue;
        }
        match kronecker_split(&primitive_integer_part(&f))? {
            None => out.push(f.monic()),
            Some(g) => {
                let g = int_poly(&g).monic();
                let h = f.exact_div(&g).expect("candidate divides");
                out.push(g);
                stack.push(h);
            }
        }
    }
    Ok(out)
}

/// Smallest-degree nontrivial factor of the integer polynomial `f` (which is
/// therefore irreducible), or `None` when `f` is irreducible. Fails when the
/// interpolation values are too large to enumerate divisors.
fn kronecker_split(f: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let n = f.len().saturating_sub(1);
    if n < 2 {
        return Ok(None);
    }
    let lc = f[n].abs();
    let fq = int_poly(f);

    // Evaluation points with the smallest values, ties broken toward small |x|.
    let mut pts: Vec<(BigInt, BigInt)> = Vec::new();
    for k in 0..=40i64 {
        let x = BigInt::from(if k % 2 == 0 { -(k / 2) } else { k / 2 + 1 });
        let v = eval_int(f, &x);
        if v.is_zero() {
            let root = QPoly::linear(RationalField, &Rational::from_integer(x.clone()));
            return Ok(Some(primitive_integer_part(&root)));
        }
        pts.push((x, v.abs()));
    }
    pts.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.abs().cmp(&b.0.abs())));

    // Among the smallest values, interpolate at those with the fewest
    // divisors; the search tree is the product of the divisor counts.
    let mut pool: Vec<(BigInt, BigInt, Vec<BigInt>)> = Vec::new();
    for (x, v) in pts.iter().take(n / 2 + 8) {
        let Some(small) = v.to_u64().filter(|&s| s <= DIVISOR_ENUMERATION_LIMIT) else {
            break;
        };
        let divs = divisors(small as u128).into_iter().map(BigInt::from).collect();
        pool.push((x.clone(), v.clone(), divs));
    }
    if pool.len() < n / 2 + 1 {
        return Err(Error::Unsupported(
            "coefficients too large for Kronecker factorization".into(),
        ));
    }

    for d in 1..=n / 2 {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by_key(|&i| pool[i].2.len());
        let (chosen, rest) = order.split_at(d + 1);
        let xs: Vec<BigInt> = chosen.iter().map(|&i| pool[i].0.clone()).collect();
        let divs: Vec<Vec<BigInt>> = chosen.iter().map(|&i| pool[i].2.clone()).collect();
        let extra: Vec<(BigInt, BigInt)> = rest
            .iter()
            .take(4)
            .map(|&i| (pool[i].0.clone(), pool[i].1.clone()))
            .collect();
        let mut search = Search {
            xs: &xs,
            divs: &divs,
            lc: &lc,
            target: &fq,
            extra: &extra,
            d,
        };
        if let Some(g) = search.descend(&mut Vec::new(), &mut Vec::new()) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

struct Search<'a> {
    xs: &'a [BigInt],
    divs: &'a [Vec<BigInt>],
    lc: &'a BigInt,
    target: &'a QPoly,
    /// Further points `(x, |f(x)|)`: a factor's value there divides `f(x)`.
    extra: &'a [(BigInt, BigInt)],
    d: usize,
}

impl Search<'_> {
    /// `newton[j]` is the divided difference `g[x_0..x_j]`; `row[i]` holds
    /// `g[x_{j−i}..x_j]` for the last point `j`. For `g ∈ Z[X]` and integer
    /// points every divided difference is an integer, which prunes the tree.
    fn descend(&mut self, newton: &mut Vec<BigInt>, row: &mut Vec<BigInt>) -> Option<Vec<BigInt>> {
        let j = newton.len();
        if j == self.d + 1 {
            return self.finish(newton);
        }
        for dv in &self.divs[j] {
            for sign in [1i8, -1] {
                // Fix g(x_0) > 0; g and −g are the same factor.
                if j == 0 && sign < 0 {
                    continue;
                }
                let v = dv * sign;
                let mut new_row = Vec::with_capacity(j + 1);
                new_row.push(v);
                let mut ok = true;
                for i in 1..=j {
                    let num = &new_row[i - 1] - &row[i - 1];
                    let den = &self.xs[j] - &self.xs[j - i];
                    let (q, r) = num.div_rem(&den);
                    if !r.is_zero() {
                        ok = false;
                        break;
                    }
                    new_row.push(q);
                }
                if !ok {
                    continue;
                }
                let top = new_row[j].clone();
                if j == self.d && (top.is_zero() || !(self.lc % &top).is_zero()) {
                    continue;
                }
                newton.push(top);
                let saved = std::mem::replace(row, new_row);
                if let Some(g) = self.descend(newton, row) {
                    return Some(g);
                }
                *row = saved;
                newton.pop();
            }
        }
        None
    }

    fn finish(&self, newton: &[BigInt]) -> Option<Vec<BigInt>> {
        for (x, fx) in self.extra {
            let mut v = BigInt::zero();
            for j in (0..newton.len()).rev() {
                v = v * (x - &self.xs[j]) + &newton[j];
            }
            if v.is_zero() || !(fx % &v).is_zero() {
                return None;
            }
        }
        // Expand Σ newton[j] ∏_{i<j} (X − x_i).
        let mut g = QPoly::zero(RationalField);
        let mut basis = QPoly::one(RationalField);
        for (j, c) in newton.iter().enumerate() {
            g = &g + &basis.scalar_mul(&Rational::from_integer(c.clone()));
            basis = &basis * &QPoly::linear(RationalField, &Rational::from_integer(self.xs[j].clone()));
        }
        if g.degree() != Some(self.d) {
            return None;
        }
        g.divides(self.target).then(|| primitive_integer_part(&g))
    }
}

/// Exhaustive irreducibility test over `Q` (degree within the Kronecker cap).
pub fn is_irreducible(p: &QPoly) -> Result<bool> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(false);
    }
    if deg > KRONECKER_DEGREE_CAP {
        return Err(Error::DegreeCap {
            degree: deg,
            cap: KRONECKER_DEGREE_CAP,
        });
    }
    if deg == 1 {
        return Ok(true);
    }
    if !p.gcd(&p.derivative())?.is_constant() {
        return Ok(false);
    }
    Ok(kronecker_split(&primitive_integer_part(p))?.is_none())
}

/// Some monic irreducible factor of a nonconstant `p`: a linear factor when
/// `p` has a rational root, otherwise the smallest Kronecker factor of its
/// squarefree part (within the degree cap).
pub fn irreducible_factor(p: &QPoly) -> Option<QPoly> {
    if p.is_constant() {
        return None;
    }
    let sqf = p.squarefree_part().ok()?;
    if let Some(r) = distinct_rational_roots(&sqf).into_iter().next() {
        return Some(QPoly::linear(RationalField, &r));
    }
    if sqf.degree()? > KRONECKER_DEGREE_CAP {
        return None;
    }
    match kronecker_split(&primitive_integer_part(&sqf)).ok()? {
        Some(g) => Some(int_poly(&g).monic()),
        None => Some(sqf.monic()),
    }
}
