//! Exact coefficient fields.
//!
//! A [`Field`] value is the *context* of a coefficient field (the discriminant
//! of a quadratic field, the modulus of a prime field); elements are plain
//! data and every operation goes through the context. Three fields are
//! provided: the rationals, quadratic fields `Q(√d)` and prime fields `F_p`.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` as a rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `num/den`, or `num` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `int` or `int/posint`. Surrounding whitespace is not accepted.
pub fn parse_rational(s: &str) -> Option<Rational> {
    fn parse_int(s: &str) -> Option<BigInt> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }
    match s.split_once('/') {
        None => parse_int(s).map(Rational::from_integer),
        Some((n, d)) => {
            let n = parse_int(n)?;
            if d.starts_with(['-', '+']) {
                return None;
            }
            let d = parse_int(d)?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
    }
}

/// Height of a rational: `max(|num|, den)`.
pub fn height(q: &Rational) -> BigInt {
    q.numer().abs().max(q.denom().clone())
}

/// Field automorphism tag. Only the identity exists over `Q` and `F_p`;
/// quadratic fields also carry conjugation `√d ↦ −√d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Automorphism {
    Identity,
    Conjugation,
}

impl Automorphism {
    pub fn compose(self, other: Automorphism) -> Automorphism {
        if self == other {
            Automorphism::Identity
        } else {
            Automorphism::Conjugation
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Automorphism::Identity => "id",
            Automorphism::Conjugation => "conj",
        }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runtime description of a field, used by file formats and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rational,
    Quadratic(i64),
    Prime(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Quadratic(d) => write!(f, "sqrt:{d}"),
            FieldSpec::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// A coefficient field. `Self` is the field context; `Elem` its elements.
pub trait Field: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + Sized {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    /// Image of a rational; fails in `F_p` when the denominator vanishes mod p.
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;

    /// Whether `sigma` is an automorphism of this field over its prime field.
    fn supports(&self, sigma: Automorphism) -> bool {
        sigma == Automorphism::Identity
    }
    fn apply_automorphism(&self, sigma: Automorphism, a: &Self::Elem) -> Self::Elem;

    /// Basis of this field `L` over the base field `K` the linear maps are
    /// defined over: `[1]` for `Q` and `F_p`, `[1, √d]` for `Q(√d)`.
    fn base_basis(&self) -> Vec<Self::Elem>;
    /// Coordinates of `a` in [`Field::base_basis`], each embedded back into `L`.
    fn base_coordinates(&self, a: &Self::Elem) -> Vec<Self::Elem>;

    /// Text form following the polynomial grammar's coefficient syntax.
    fn format(&self, a: &Self::Elem) -> String;
    /// Whether [`Field::format`] output needs no parentheses when negated.
    fn is_signed_literal(&self, a: &Self::Elem) -> Option<bool>;

    fn random_elem(&self, rng: &mut dyn RngCore, height: u64) -> Self::Elem;

    /// The distinct roots of `p` lying in this field.
    fn roots_of(&self, p: &Polynomial<Self>) -> Result<Vec<Self::Elem>>;

    /// An irreducible factor of `p`, when this field can produce one.
    fn irreducible_divisor(&self, _p: &Polynomial<Self>) -> Option<Polynomial<Self>> {
        None
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let inv = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, &inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Q

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_int(&self, n: i64) -> Rational {
        int(n)
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn apply_automorphism(&self, _sigma: Automorphism, a: &Rational) -> Rational {
        a.clone()
    }
    fn base_basis(&self) -> Vec<Rational> {
        vec![Rational::one()]
    }
    fn base_coordinates(&self, a: &Rational) -> Vec<Rational> {
        vec![a.clone()]
    }
    fn format(&self, a: &Rational) -> String {
        fmt_rational(a)
    }
    fn is_signed_literal(&self, a: &Rational) -> Option<bool> {
        Some(a.is_negative())
    }
    fn random_elem(&self, rng: &mut dyn RngCore, height: u64) -> Rational {
        random_rational(rng, height)
    }
    fn roots_of(&self, p: &Polynomial<Self>) -> Result<Vec<Rational>> {
        Ok(crate::factor::rational_roots(p)?
            .into_iter()
            .map(|(r, _)| r)
            .collect())
    }
    fn irreducible_divisor(&self, p: &Polynomial<Self>) -> Option<Polynomial<Self>> {
        crate::factor::irreducible_factor(p)
    }
}

/// Uniform numerator in `[-h, h]`, denominator in `[1, h]`.
pub fn random_rational(rng: &mut dyn RngCore, height: u64) -> Rational {
    let h = height.max(1) as i64;
    let num = rng.gen_range(-h..=h);
    let den = rng.gen_range(1..=h);
    rat(num, den)
}

// ---------------------------------------------------------------------------
// Q(√d)

/// Element `u + v√d` of a quadratic field; `d` lives in the field context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub u: Rational,
    pub v: Rational,
}

impl QuadElem {
    pub fn new(u: Rational, v: Rational) -> Self {
        QuadElem { u, v }
    }

    pub fn rational(u: Rational) -> Self {
        QuadElem {
            u,
            v: Rational::zero(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }
}

/// The quadratic field `Q(√d)` for a squarefree `d ∉ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticField {
    d: i64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d.unsigned_abs()) {
            return Err(Error::InvalidField(format!(
                "d = {d} must be a squarefree integer other than 0 and 1"
            )));
        }
        Ok(QuadraticField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// The generator `√d`.
    pub fn sqrt_d(&self) -> QuadElem {
        QuadElem::new(Rational::zero(), Rational::one())
    }

    pub fn elem(&self, u: Rational, v: Rational) -> QuadElem {
        QuadElem::new(u, v)
    }

    pub fn conjugate(&self, z: &QuadElem) -> QuadElem {
        QuadElem::new(z.u.clone(), -&z.v)
    }

    /// `u² − d v²`.
    pub fn norm(&self, z: &QuadElem) -> Rational {
        &z.u * &z.u - int(self.d) * &z.v * &z.v
    }

    pub fn trace(&self, z: &QuadElem) -> Rational {
        &z.u + &z.u
    }

    /// Coefficientwise conjugation of a polynomial.
    pub fn apply_sigma(&self, p: &Polynomial<Self>) -> Polynomial<Self> {
        p.apply_automorphism(Automorphism::Conjugation)
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut q = 2u64;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return false;
            }
        }
        q += 1;
    }
    true
}

impl Field for QuadraticField {
    type Elem = QuadElem;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Quadratic(self.d)
    }
    fn zero(&self) -> QuadElem {
        QuadElem::rational(Rational::zero())
    }
    fn one(&self) -> QuadElem {
        QuadElem::rational(Rational::one())
    }
    fn from_int(&self, n: i64) -> QuadElem {
        QuadElem::rational(int(n))
    }
    fn from_rational(&self, q: &Rational) -> Result<QuadElem> {
        Ok(QuadElem::rational(q.clone()))
    }
    fn is_zero(&self, a: &QuadElem) -> bool {
        a.u.is_zero() && a.v.is_zero()
    }
    fn add(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        QuadElem::new(&a.u + &b.u, &a.v + &b.v)
    }
    fn sub(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        QuadElem::new(&a.u - &b.u, &a.v - &b.v)
    }
    fn mul(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        let d = int(self.d);
        QuadElem::new(
            &a.u * &b.u + d * &a.v * &b.v,
            &a.u * &b.v + &a.v * &b.u,
        )
    }
    fn neg(&self, a: &QuadElem) -> QuadElem {
        QuadElem::new(-&a.u, -&a.v)
    }
    fn inv(&self, a: &QuadElem) -> Option<QuadElem> {
        let n = self.norm(a);
        if n.is_zero() {
            return None;
        }
        Some(QuadElem::new(&a.u / &n, -&a.v / &n))
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn supports(&self, _sigma: Automorphism) -> bool {
        true
    }
    fn apply_automorphism(&self, sigma: Automorphism, a: &QuadElem) -> QuadElem {
        match sigma {
            Automorphism::Identity => a.clone(),
            Automorphism::Conjugation => self.conjugate(a),
        }
    }
    fn base_basis(&self) -> Vec<QuadElem> {
        vec![self.one(), self.sqrt_d()]
    }
    fn base_coordinates(&self, a: &QuadElem) -> Vec<QuadElem> {
        vec![QuadElem::rational(a.u.clone()), QuadElem::rational(a.v.clone())]
    }
    fn format(&self, a: &QuadElem) -> String {
        if a.is_rational() {
            return fmt_rational(&a.u);
        }
        if a.v.is_negative() {
            format!("({}-{}*s)", fmt_rational(&a.u), fmt_rational(&-&a.v))
        } else {
            format!("({}+{}*s)", fmt_rational(&a.u), fmt_rational(&a.v))
        }
    }
    fn is_signed_literal(&self, a: &QuadElem) -> Option<bool> {
        a.is_rational().then(|| a.u.is_negative())
    }
    fn random_elem(&self, rng: &mut dyn RngCore, height: u64) -> QuadElem {
        QuadElem::new(random_rational(rng, height), random_rational(rng, height))
    }
    fn roots_of(&self, p: &Polynomial<Self>) -> Result<Vec<QuadElem>> {
        Ok(crate::hilbert::roots_in_quadratic(p)?.roots)
    }
}

// ---------------------------------------------------------------------------
// F_p

/// Prime fields up to `2^32` keep products inside `u64`.
pub const MAX_PRIME: u64 = 1 << 32;

/// Largest `p` for which root finding enumerates the whole field.
pub const PRIME_ENUMERATION_LIMIT: u64 = 1 << 20;

/// The prime field `F_p`; elements are residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidField(format!(
                "p = {p} must be a prime below 2^32"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// All field elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }

    fn reduce_big(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        n.mod_floor(&p).to_u64().expect("residue fits")
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_int(&self, n: i64) -> u64 {
        self.elem(n)
    }
    fn from_rational(&self, q: &Rational) -> Result<u64> {
        let num = self.reduce_big(q.numer());
        let den = self.reduce_big(q.denom());
        let inv = self.inv(&den).ok_or_else(|| {
            Error::NotInField(format!("{} has a denominator divisible by {}", fmt_rational(q), self.p))
        })?;
        Ok(self.mul(&num, &inv))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(self.pow(a, self.p - 2))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn apply_automorphism(&self, _sigma: Automorphism, a: &u64) -> u64 {
        *a
    }
    fn base_basis(&self) -> Vec<u64> {
        vec![1]
    }
    fn base_coordinates(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn is_signed_literal(&self, _a: &u64) -> Option<bool> {
        Some(false)
    }
    fn random_elem(&self, rng: &mut dyn RngCore, _height: u64) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn roots_of(&self, p: &Polynomial<Self>) -> Result<Vec<u64>> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.p > PRIME_ENUMERATION_LIMIT {
            return Err(Error::Unsupported(format!(
                "root enumeration over F_{} exceeds the 2^20 element limit",
                self.p
            )));
        }
        Ok(self.elements().filter(|x| p.evaluate(x) == 0).collect())
    }
    fn irreducible_divisor(&self, p: &Polynomial<Self>) -> Option<Polynomial<Self>> {
        smallest_monic_divisor_fp(self, p)
    }
}

/// Smallest-degree monic nonconstant divisor of `p` over `F_p`, found by
/// enumerating monic candidates; it is irreducible by minimality. Gives up
/// when the enumeration would exceed 10^6 candidates.
fn smallest_monic_divisor_fp(field: &PrimeField, p: &Polynomial<PrimeField>) -> Option<Polynomial<PrimeField>> {
    let deg = p.degree()?;
    if deg == 0 {
        return None;
    }
    let q = field.p;
    for d in 1..=deg / 2 {
        let count = q.checked_pow(d as u32).filter(|c| *c <= 1_000_000)?;
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                coeffs.push(rest % q);
                rest /= q;
            }
            coeffs.push(1);
            let cand = Polynomial::new(*field, coeffs);
            if cand.divides(p) {
                return Some(cand);
            }
        }
    }
    Some(p.monic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(fmt_rational(&rat(-10, 4)), "-5/2");
    }

    #[test]
    fn rational_invariants() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        let z = rat(0, 7);
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn quadratic_field_validation() {
        assert!(QuadraticField::new(2).is_ok());
        assert!(QuadraticField::new(-1).is_ok());
        assert!(QuadraticField::new(1).is_err());
        assert!(QuadraticField::new(0).is_err());
        assert!(QuadraticField::new(12).is_err());
        assert!(QuadraticField::new(-4).is_err());
    }

    #[test]
    fn conjugate_example() {
        let k = QuadraticField::new(5).unwrap();
        let z = k.elem(int(1), int(2));
        assert_eq!(k.conjugate(&z), k.elem(int(1), int(-2)));
    }

    #[test]
    fn conjugation_is_field_automorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2, 5, -1, -3] {
            let k = QuadraticField::new(d).unwrap();
            for _ in 0..50 {
                let a = k.random_elem(&mut rng, 20);
                let b = k.random_elem(&mut rng, 20);
                let c = |z: &QuadElem| k.conjugate(z);
                assert_eq!(c(&k.add(&a, &b)), k.add(&c(&a), &c(&b)));
                assert_eq!(c(&k.mul(&a, &b)), k.mul(&c(&a), &c(&b)));
                assert_eq!(c(&c(&a)), a);
                let r = k.from_rational(&a.u).unwrap();
                assert_eq!(c(&r), r);
                if !k.is_zero(&a) {
                    assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
                }
            }
        }
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.from_rational(&rat(1, 2)).unwrap(), 4);
        assert!(f.from_rational(&rat(1, 7)).is_err());
        for a in 1..7 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert!(PrimeField::new(9).is_err());
    }
}
