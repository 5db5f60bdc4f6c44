//! Linear maps on truncated polynomial spaces and the affine preservers
//! `P ↦ c·σ(P)(aX + b)`: application, recovery of `(a, b, c)` and `(c, σ, Y)`
//! from a matrix, and randomized refutation of non-preservers.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Automorphism, Field};
use crate::freeness::{k_fold_roots, k_free};
use crate::linalg::Matrix;
use crate::operators::LinearPolyMap;
use crate::poly::Polynomial;
use crate::trials::{first_hit, rationals_up_to_height, trial_rng};

/// `P ↦ c·σ(P)(aX + b)` with `a, c ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSigmaPreserver<F: Field> {
    field: F,
    pub a: F::Elem,
    pub b: F::Elem,
    pub c: F::Elem,
    pub sigma: Automorphism,
}

impl<F: Field> AffineSigmaPreserver<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem, c: F::Elem, sigma: Automorphism) -> Result<Self> {
        if field.is_zero(&a) || field.is_zero(&c) {
            return Err(Error::InvalidArgument("a and c must be nonzero".into()));
        }
        if !field.supports(sigma) {
            return Err(Error::InvalidArgument(format!(
                "{} has no automorphism {sigma}",
                field.spec()
            )));
        }
        Ok(AffineSigmaPreserver { field, a, b, c, sigma })
    }

    pub fn identity(field: F) -> Self {
        let (one, zero) = (field.one(), field.zero());
        AffineSigmaPreserver {
            a: one.clone(),
            b: zero,
            c: one,
            sigma: Automorphism::Identity,
            field,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// `aX + b`.
    pub fn inner(&self) -> Polynomial<F> {
        Polynomial::new(self.field.clone(), vec![self.b.clone(), self.a.clone()])
    }

    pub fn apply(&self, p: &Polynomial<F>) -> Polynomial<F> {
        p.apply_automorphism(self.sigma)
            .compose(&self.inner())
            .scalar_mul(&self.c)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let f = &self.field;
        let s = |x: &F::Elem| f.apply_automorphism(self.sigma, x);
        let a2 = s(&other.a);
        AffineSigmaPreserver {
            a: f.mul(&a2, &self.a),
            b: f.add(&f.mul(&a2, &self.b), &s(&other.b)),
            c: f.mul(&self.c, &s(&other.c)),
            sigma: self.sigma.compose(other.sigma),
            field: f.clone(),
        }
    }

    /// The root permutation: `(X − x)^k` is sent to a multiple of `(X − μ(x))^k`
    /// with `μ(x) = (σ(x) − b)/a`.
    pub fn mu(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let num = f.sub(&f.apply_automorphism(self.sigma, x), &self.b);
        f.div(&num, &self.a).expect("a is nonzero")
    }

    pub fn to_matrix(&self, n: usize) -> Result<TruncatedLinearMap<F>> {
        if n < 2 {
            return Err(Error::InvalidArgument("degree bound must be at least 2".into()));
        }
        TruncatedLinearMap::from_fn(self.field.clone(), n, |p| Ok(self.apply(p)))
    }
}

impl<F: Field> LinearPolyMap<F> for AffineSigmaPreserver<F> {
    fn apply(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        Ok(AffineSigmaPreserver::apply(self, p))
    }
}

/// A map on the polynomials of degree ≤ n that is linear over the base field
/// `K` (`Q` or `F_p`).
///
/// Columns are the images of the `K`-basis `β_t X^j`, where `β` is
/// [`Field::base_basis`]: column `j·m + t` is `f(β_t X^j)` with `m` the basis
/// size. Over `Q` and `F_p` this is the usual matrix with column `j = f(X^j)`;
/// over `Q(√d)` there are `2(n+1)` columns so that semilinear maps such as
/// conjugation are representable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedLinearMap<F: Field> {
    field: F,
    n: usize,
    columns: Vec<Polynomial<F>>,
}

impl<F: Field> TruncatedLinearMap<F> {
    pub fn from_columns(field: F, n: usize, columns: Vec<Polynomial<F>>) -> Result<Self> {
        let m = field.base_basis().len();
        if columns.len() != m * (n + 1) {
            return Err(Error::InvalidArgument(format!(
                "expected {} columns for degree bound {n}, got {}",
                m * (n + 1),
                columns.len()
            )));
        }
        for (i, c) in columns.iter().enumerate() {
            if c.field() != &field {
                return Err(Error::FieldMismatch(field.spec().to_string(), c.field().spec().to_string()));
            }
            if let Some(d) = c.degree().filter(|&d| d > n) {
                return Err(Error::InvalidArgument(format!(
                    "column {i} has degree {d}, above the bound {n}"
                )));
            }
        }
        Ok(TruncatedLinearMap { field, n, columns })
    }

    /// Tabulates `f` on the basis `β_t X^j`.
    pub fn from_fn(field: F, n: usize, f: impl Fn(&Polynomial<F>) -> Result<Polynomial<F>>) -> Result<Self> {
        let basis = field.base_basis();
        let mut columns = Vec::with_capacity(basis.len() * (n + 1));
        for j in 0..=n {
            for beta in &basis {
                columns.push(f(&Polynomial::monomial(field.clone(), beta.clone(), j))?);
            }
        }
        Self::from_columns(field, n, columns)
    }

    pub fn identity(field: F, n: usize) -> Self {
        Self::from_fn(field, n, |p| Ok(p.clone())).expect("identity fits")
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn degree_bound(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Polynomial<F>] {
        &self.columns
    }

    fn basis_len(&self) -> usize {
        self.columns.len() / (self.n + 1)
    }

    /// `f(β_t X^j)`.
    pub fn column(&self, j: usize, t: usize) -> &Polynomial<F> {
        &self.columns[j * self.basis_len() + t]
    }

    /// `f(X^j)`.
    pub fn image_of_monomial(&self, j: usize) -> &Polynomial<F> {
        self.column(j, 0)
    }

    pub fn apply(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        if let Some(d) = p.degree().filter(|&d| d > self.n) {
            return Err(Error::TruncationOverflow {
                needed: d,
                bound: self.n,
            });
        }
        let f = &self.field;
        let mut out = Polynomial::zero(f.clone());
        for (j, coeff) in p.coeffs().iter().enumerate() {
            for (t, x) in f.base_coordinates(coeff).iter().enumerate() {
                if !f.is_zero(x) {
                    out = &out + &self.column(j, t).scalar_mul(x);
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::InvalidArgument("maps act on different spaces".into()));
        }
        let columns = other
            .columns
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(self.field.clone(), self.n, columns)
    }

    /// The square matrix over `K` in the basis `β_t X^j`, entries embedded in `F`.
    pub fn matrix(&self) -> Matrix<F> {
        let f = &self.field;
        let m = self.basis_len();
        let size = m * (self.n + 1);
        let cols = self
            .columns
            .iter()
            .map(|c| {
                let mut v = Vec::with_capacity(size);
                for j in 0..=self.n {
                    v.extend(f.base_coordinates(&c.coeff(j)));
                }
                v
            })
            .collect();
        Matrix::from_columns(f.clone(), cols).expect("square")
    }

    pub fn is_bijective(&self) -> bool {
        self.matrix().is_invertible()
    }
}

impl<F: Field> LinearPolyMap<F> for TruncatedLinearMap<F> {
    fn apply(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        TruncatedLinearMap::apply(self, p)
    }
}

/// Result of computing the root permutation at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MuOutcome<E> {
    /// The unique `y` with `(X − y)^k` dividing every image.
    Found(E),
    /// No such `y` in the field.
    Absent,
    /// Several candidates; impossible for a preserver.
    Ambiguous(Vec<E>),
}

/// Finds `y` with `f((X − x)^k K[X]) ⊆ (X − y)^k K[X]` within degree ≤ n, via
/// the gcd of the images of `β_t (X − x)^k X^j`.
pub fn mu_at<F: Field>(map: &TruncatedLinearMap<F>, x: &F::Elem, k: usize) -> Result<MuOutcome<F::Elem>> {
    let n = map.degree_bound();
    if n < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "degree bound {n} too small for k = {k}; need at least {}",
            k + 1
        )));
    }
    let f = map.field();
    let power = Polynomial::linear(f.clone(), x).pow(k as u32);
    let mut g: Option<Polynomial<F>> = None;
    for j in 0..=n - k {
        for beta in f.base_basis() {
            let probe = &power * &Polynomial::monomial(f.clone(), beta, j);
            let image = map.apply(&probe)?;
            if image.is_zero() {
                continue;
            }
            g = Some(match g {
                None => image.monic(),
                Some(acc) => acc.gcd(&image)?,
            });
        }
    }
    let Some(g) = g else {
        return Ok(MuOutcome::Absent);
    };
    if g.is_constant() {
        return Ok(MuOutcome::Absent);
    }
    let mut ys = k_fold_roots(&g, k)?;
    Ok(match ys.len() {
        0 => MuOutcome::Absent,
        1 => MuOutcome::Found(ys.pop().unwrap()),
        _ => MuOutcome::Ambiguous(ys),
    })
}

/// Recovered data `f(P) = c·σ(P)(Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreserverDecomposition<F: Field> {
    /// `f(1)`.
    pub c: Polynomial<F>,
    pub y: Polynomial<F>,
    pub sigma: Automorphism,
    /// `(a, b)` with `Y = aX + b`, when `Y` has degree 1.
    pub affine: Option<(F::Elem, F::Elem)>,
    /// Sample points and their images under the root permutation.
    pub samples: Vec<(F::Elem, F::Elem)>,
    /// Sample points where no image was found.
    pub exceptional: Vec<F::Elem>,
}

impl<F: Field> PreserverDecomposition<F> {
    /// The constant `c` when `f(1)` is constant.
    pub fn c_constant(&self) -> Option<F::Elem> {
        self.c.is_constant().then(|| self.c.coeff(0))
    }
}

/// Why a map is not of the form `c·σ(P)(aX + b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation<F: Field> {
    NotBijective,
    /// `f(1)` is not a nonzero constant.
    ImageOfOne(Polynomial<F>),
    /// The root permutation is not single-valued at `x`.
    AmbiguousMu { x: F::Elem, candidates: Vec<F::Elem> },
    /// Fewer than two sample points have a root image.
    MuUndetermined { exceptional: Vec<F::Elem> },
    /// Two sample points share an image.
    MuNotInjective { x1: F::Elem, x2: F::Elem, y: F::Elem },
    /// The root permutation at `x` is off the line fitted to earlier samples.
    MuNotAffine { x: F::Elem, mu: F::Elem, expected: F::Elem },
    /// `f(1)` does not divide `f(X)`.
    NotDivisible,
    /// `f(β)/f(1) ≠ σ(β)` for every automorphism σ.
    NoAutomorphism { basis_index: usize, quotient: Polynomial<F> },
    /// The image of `β_t X^j` differs from the prediction.
    MonomialMismatch {
        j: usize,
        t: usize,
        expected: Polynomial<F>,
        actual: Polynomial<F>,
    },
}

impl<F: Field> Refutation<F> {
    pub fn describe(&self, field: &F) -> String {
        let e = |x: &F::Elem| field.format(x);
        match self {
            Refutation::NotBijective => "map is not bijective".into(),
            Refutation::ImageOfOne(p) => format!("f(1) = {p} is not a nonzero constant"),
            Refutation::AmbiguousMu { x, candidates } => {
                let c: Vec<String> = candidates.iter().map(e).collect();
                format!("mu is ambiguous at x = {}: {}", e(x), c.join(", "))
            }
            Refutation::MuUndetermined { exceptional } => format!(
                "mu is undefined at {} of the sample points",
                exceptional.len()
            ),
            Refutation::MuNotInjective { x1, x2, y } => {
                format!("mu({}) = mu({}) = {}", e(x1), e(x2), e(y))
            }
            Refutation::MuNotAffine { x, mu, expected } => format!(
                "mu({}) = {} but the fitted line predicts {}",
                e(x),
                e(mu),
                e(expected)
            ),
            Refutation::NotDivisible => "f(1) does not divide f(X)".into(),
            Refutation::NoAutomorphism { basis_index, quotient } => format!(
                "f(b)/f(1) = {quotient} for basis element {basis_index} matches no automorphism"
            ),
            Refutation::MonomialMismatch { j, t, expected, actual } => {
                format!("image of basis element {t} times X^{j} is {actual}, expected {expected}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recovery<F: Field> {
    Recovered(PreserverDecomposition<F>),
    Refuted(Refutation<F>),
}

/// Default sample points for [`recover_affine`].
pub fn default_sample_points<F: Field>(field: &F) -> Vec<F::Elem> {
    (0..4).map(|i| field.from_int(i)).collect()
}

/// Recovers `(a, b, c)` with `f(P) = c·P(aX + b)` from a matrix.
///
/// The root permutation is sampled at the given points (exceptional points
/// are skipped and reported), `μ(x) = (x − b)/a` is fitted through the first
/// two successes and checked at the rest (a preserver has a root image
/// everywhere, so fewer than two successes refutes), and finally every column is
/// compared with `c·β_t·(aX + b)^j`.
pub fn recover_affine<F: Field>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    sample_points: &[F::Elem],
) -> Result<Recovery<F>> {
    let f = map.field().clone();
    let n = map.degree_bound();
    if n < k + 2 {
        return Err(Error::InvalidArgument(format!(
            "degree bound {n} too small for k = {k}; need at least {}",
            k + 2
        )));
    }
    if sample_points.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 sample points".into()));
    }
    if !map.is_bijective() {
        return Ok(Recovery::Refuted(Refutation::NotBijective));
    }
    let one = map.image_of_monomial(0).clone();
    if !one.is_constant() || one.is_zero() {
        return Ok(Recovery::Refuted(Refutation::ImageOfOne(one)));
    }
    let mut samples: Vec<(F::Elem, F::Elem)> = Vec::new();
    let mut exceptional = Vec::new();
    let mut line: Option<(F::Elem, F::Elem)> = None;
    for x in sample_points {
        let y = match mu_at(map, x, k)? {
            MuOutcome::Found(y) => y,
            MuOutcome::Absent => {
                exceptional.push(x.clone());
                continue;
            }
            MuOutcome::Ambiguous(candidates) => {
                return Ok(Recovery::Refuted(Refutation::AmbiguousMu {
                    x: x.clone(),
                    candidates,
                }))
            }
        };
        if let Some((x1, y1)) = samples.iter().find(|(_, y1)| *y1 == y) {
            return Ok(Recovery::Refuted(Refutation::MuNotInjective {
                x1: x1.clone(),
                x2: x.clone(),
                y: y1.clone(),
            }));
        }
        // x = a·μ(x) + b.
        if let Some((a, b)) = &line {
            let expected = f.div(&f.sub(x, b), a)?;
            if expected != y {
                return Ok(Recovery::Refuted(Refutation::MuNotAffine {
                    x: x.clone(),
                    mu: y,
                    expected,
                }));
            }
        } else if let Some((x1, y1)) = samples.first() {
            let a = f.div(&f.sub(x1, x), &f.sub(y1, &y))?;
            let b = f.sub(x1, &f.mul(&a, y1));
            line = Some((a, b));
        }
        samples.push((x.clone(), y));
    }
    let Some((a, b)) = line else {
        return Ok(Recovery::Refuted(Refutation::MuUndetermined { exceptional }));
    };
    let y = Polynomial::new(f.clone(), vec![b.clone(), a.clone()]);
    if let Some(r) = check_columns(map, &one, &y, Automorphism::Identity) {
        return Ok(Recovery::Refuted(r));
    }
    Ok(Recovery::Recovered(PreserverDecomposition {
        c: one,
        y,
        sigma: Automorphism::Identity,
        affine: Some((a, b)),
        samples,
        exceptional,
    }))
}

/// First column with `f(β_t X^j) ≠ f(1)·σ(β_t)·Y^j`.
fn check_columns<F: Field>(
    map: &TruncatedLinearMap<F>,
    one: &Polynomial<F>,
    y: &Polynomial<F>,
    sigma: Automorphism,
) -> Option<Refutation<F>> {
    let f = map.field();
    let basis = f.base_basis();
    let mut y_pow = Polynomial::one(f.clone());
    for j in 0..=map.degree_bound() {
        for (t, beta) in basis.iter().enumerate() {
            let expected = (one * &y_pow).scalar_mul(&f.apply_automorphism(sigma, beta));
            let actual = map.column(j, t);
            if *actual != expected {
                return Some(Refutation::MonomialMismatch {
                    j,
                    t,
                    expected,
                    actual: actual.clone(),
                });
            }
        }
        y_pow = &y_pow * y;
    }
    None
}

/// Recovers `f(P) = f(1)·σ(P)(Y)` with `Y = f(X)/f(1)` and `σ` read off from
/// `f(β)/f(1)` on the basis of `L` over `K`.
pub fn recover_sigma_y<F: Field>(map: &TruncatedLinearMap<F>) -> Result<Recovery<F>> {
    let f = map.field().clone();
    let one = map.image_of_monomial(0).clone();
    if !one.is_constant() || one.is_zero() {
        return Ok(Recovery::Refuted(Refutation::ImageOfOne(one)));
    }
    let Some(y) = map.image_of_monomial(1).exact_div(&one) else {
        return Ok(Recovery::Refuted(Refutation::NotDivisible));
    };
    let basis = f.base_basis();
    let mut sigma = None;
    for candidate in [Automorphism::Identity, Automorphism::Conjugation] {
        if !f.supports(candidate) {
            continue;
        }
        let fits = basis.iter().enumerate().all(|(t, beta)| {
            map.column(0, t).exact_div(&one)
                == Some(Polynomial::constant(f.clone(), f.apply_automorphism(candidate, beta)))
        });
        if fits {
            sigma = Some(candidate);
            break;
        }
    }
    let Some(sigma) = sigma else {
        let t = (0..basis.len())
            .find(|&t| {
                map.column(0, t).exact_div(&one) != Some(Polynomial::constant(f.clone(), basis[t].clone()))
            })
            .unwrap_or(0);
        let quotient = map.column(0, t).euclid_div(&one)?.0;
        return Ok(Recovery::Refuted(Refutation::NoAutomorphism {
            basis_index: t,
            quotient,
        }));
    };
    if let Some(r) = check_columns(map, &one, &y, sigma) {
        return Ok(Recovery::Refuted(r));
    }
    let affine = (y.degree() == Some(1)).then(|| (y.coeff(1), y.coeff(0)));
    Ok(Recovery::Recovered(PreserverDecomposition {
        c: one,
        y,
        sigma,
        affine,
        samples: Vec::new(),
        exceptional: Vec::new(),
    }))
}

/// Which property a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    KFree,
    KRoot,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::KFree => "k-free",
            Property::KRoot => "k-root",
        })
    }
}

/// A polynomial whose property value differs from that of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness<F: Field> {
    /// Trial or probe index that produced it.
    pub index: u64,
    pub property: Property,
    pub p: Polynomial<F>,
    pub image: Polynomial<F>,
    pub holds_for_p: bool,
    pub holds_for_image: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<F: Field> {
    pub evaluations: u64,
    /// The violation with the smallest index, if any.
    pub witness: Option<Witness<F>>,
}

impl<F: Field> Verdict<F> {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Property value, with the zero polynomial counted as not k-free and as
/// having every k-fold root.
pub fn property_holds<F: Field>(p: &Polynomial<F>, k: usize, property: Property) -> Result<bool> {
    if p.is_zero() {
        return Ok(property == Property::KRoot);
    }
    match property {
        Property::KFree => k_free(p, k),
        Property::KRoot => Ok(!k_fold_roots(p, k)?.is_empty()),
    }
}

fn random_poly<F: Field>(field: &F, rng: &mut dyn rand::RngCore, max_deg: usize) -> Polynomial<F> {
    let d = (rng.next_u64() % (max_deg as u64 + 1)) as usize;
    Polynomial::new(field.clone(), (0..=d).map(|_| field.random_elem(rng, 6)).collect())
}

/// Trial `i` of degree ≤ n: a random cofactor times `(X − x)^k` when
/// `factored`, otherwise unrestricted.
fn sample_trial<F: Field>(field: &F, n: usize, k: usize, seed: u64, i: u64, factored: bool) -> Polynomial<F> {
    let mut rng = trial_rng(seed, i);
    if factored && n >= k {
        let x = field.random_elem(&mut rng, 6);
        let mut cof = random_poly(field, &mut rng, n - k);
        if cof.is_zero() {
            cof = Polynomial::one(field.clone());
        }
        &Polynomial::linear(field.clone(), &x).pow(k as u32) * &cof
    } else {
        random_poly(field, &mut rng, n)
    }
}

fn check_pair<F: Field>(
    map: &TruncatedLinearMap<F>,
    p: &Polynomial<F>,
    k: usize,
    properties: &[Property],
    index: u64,
) -> Result<Option<Witness<F>>> {
    if p.is_zero() {
        return Ok(None);
    }
    let image = map.apply(p)?;
    for &property in properties {
        let holds_for_p = property_holds(p, k, property)?;
        let holds_for_image = property_holds(&image, k, property)?;
        if holds_for_p != holds_for_image {
            return Ok(Some(Witness {
                index,
                property,
                p: p.clone(),
                image,
                holds_for_p,
                holds_for_image,
            }));
        }
    }
    Ok(None)
}

fn require_k<F: Field>(field: &F, k: usize, properties: &[Property]) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let ch = field.characteristic();
    if properties.contains(&Property::KFree) && ch != 0 && ch <= k as u64 {
        return Err(Error::CharacteristicTooSmall { characteristic: ch, k });
    }
    Ok(())
}

/// Runs `probe` over `0..count` keeping the smallest-index hit; errors abort
/// the run and are reported.
fn search<F: Field, P>(count: u64, threads: usize, probe: P) -> Result<Option<Witness<F>>>
where
    P: Fn(u64) -> Result<Option<Witness<F>>> + Sync + Send,
{
    let hit = first_hit(count, threads, |i| match probe(i) {
        Ok(None) => None,
        Ok(Some(w)) => Some(Ok(w)),
        Err(e) => Some(Err(e)),
    });
    hit.map(|(_, r)| r).transpose()
}

fn verify<F: Field>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    trials: u64,
    seed: u64,
    threads: usize,
    property: Property,
) -> Result<Verdict<F>> {
    let f = map.field();
    require_k(f, k, &[property])?;
    let n = map.degree_bound();
    let witness = search(trials, threads, |i| {
        let p = sample_trial(f, n, k, seed, i, i % 2 == 0);
        check_pair(map, &p, k, &[property], i)
    })?;
    Ok(Verdict {
        evaluations: trials,
        witness,
    })
}

/// Samples polynomials of degree ≤ n and checks `P k-free ⇔ f(P) k-free`.
pub fn verify_preserves_kfree<F: Field>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<Verdict<F>> {
    verify(map, k, trials, seed, threads, Property::KFree)
}

/// Samples polynomials of degree ≤ n and checks that `P` has a k-fold root in
/// the field exactly when `f(P)` does.
pub fn verify_preserves_k_root<F: Field>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<Verdict<F>> {
    verify(map, k, trials, seed, threads, Property::KRoot)
}

/// The structured probes `(X − x)^k X^j`, `x` by increasing height.
fn structured_probes<F: Field>(field: &F, n: usize, k: usize, count: usize) -> Vec<Polynomial<F>> {
    let mut out = Vec::with_capacity(count);
    if n < k {
        return out;
    }
    let mut seen: Vec<F::Elem> = Vec::new();
    for q in rationals_up_to_height(u64::MAX) {
        if out.len() >= count {
            break;
        }
        let Ok(x) = field.from_rational(&q) else {
            continue;
        };
        if seen.contains(&x) {
            // Finite fields run out of new points.
            if field.characteristic() != 0 && seen.len() as u64 >= field.characteristic() {
                break;
            }
            continue;
        }
        seen.push(x.clone());
        let power = Polynomial::linear(field.clone(), &x).pow(k as u32);
        for j in 0..=n - k {
            out.push(&power * &Polynomial::monomial(field.clone(), field.one(), j));
        }
    }
    out.truncate(count);
    out
}

/// Interleaves structured probes (even evaluations) with seeded random
/// polynomials (odd evaluations, alternating between random multiples of
/// `(X − x)^k` and unrestricted ones) and returns the violation of either
/// property with the smallest evaluation index.
pub fn counterexample_search<F: Field>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    budget: u64,
    seed: u64,
    threads: usize,
) -> Result<Verdict<F>> {
    let f = map.field();
    let properties = if f.characteristic() == 0 || f.characteristic() > k as u64 {
        vec![Property::KFree, Property::KRoot]
    } else {
        vec![Property::KRoot]
    };
    require_k(f, k, &properties)?;
    let n = map.degree_bound();
    let probes = structured_probes(f, n, k, budget.div_ceil(2) as usize);
    let witness = search(budget, threads, |i| {
        let p = if i % 2 == 0 {
            match probes.get((i / 2) as usize) {
                Some(p) => p.clone(),
                None => sample_trial(f, n, k, seed, i, i % 4 == 0),
            }
        } else {
            sample_trial(f, n, k, seed, i, i % 4 == 1)
        };
        check_pair(map, &p, k, &properties, i)
    })?;
    Ok(Verdict {
        evaluations: budget,
        witness,
    })
}

/// The bijection of degree ≤ n sending `X^j ↦ X^{2j}` for `2j ≤ n` and the
/// remaining monomials, in order, to the odd powers. It agrees with
/// `P ↦ P(X²)` wherever that stays inside the space.
pub fn square_substitution_map<F: Field>(field: F, n: usize) -> Result<TruncatedLinearMap<F>> {
    let mut targets: Vec<usize> = (0..=n / 2).map(|j| 2 * j).collect();
    targets.extend((1..=n).step_by(2));
    TruncatedLinearMap::from_fn(field.clone(), n, |p| {
        let j = p.degree_or_zero();
        Ok(Polynomial::monomial(field.clone(), p.coeff(j), targets[j]))
    })
}

/// The identity with the images of `X^i` and `X^j` exchanged.
pub fn basis_swap_map<F: Field>(field: F, n: usize, i: usize, j: usize) -> Result<TruncatedLinearMap<F>> {
    if i > n || j > n {
        return Err(Error::InvalidArgument("swap index above the degree bound".into()));
    }
    TruncatedLinearMap::from_fn(field.clone(), n, |p| {
        let d = p.degree_or_zero();
        let to = if d == i {
            j
        } else if d == j {
            i
        } else {
            d
        };
        Ok(Polynomial::monomial(field.clone(), p.coeff(d), to))
    })
}

/// `base` with `value` added to coefficient `row` of the image of `X^col`.
pub fn perturb_entry<F: Field>(
    base: &TruncatedLinearMap<F>,
    row: usize,
    col: usize,
    value: &F::Elem,
) -> Result<TruncatedLinearMap<F>> {
    let f = base.field().clone();
    let n = base.degree_bound();
    if row > n || col > n {
        return Err(Error::InvalidArgument("entry outside the matrix".into()));
    }
    let m = base.basis_len();
    let mut columns = base.columns().to_vec();
    for t in 0..m {
        let beta = &f.base_basis()[t];
        let bump = Polynomial::monomial(f.clone(), f.mul(value, beta), row);
        columns[col * m + t] = &columns[col * m + t] + &bump;
    }
    TruncatedLinearMap::from_columns(f, n, columns)
}
