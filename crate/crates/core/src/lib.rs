//! Exact polynomial algebra for linear maps that preserve k-free polynomials.
//!
//! Coefficients live in `Q`, a quadratic field `Q(√d)` or a prime field
//! `F_p`. On top of dense polynomial arithmetic the crate provides k-free
//! tests, differential-operator identities, recovery of the affine data of a
//! preserver given as a matrix, and exact real-root analysis over `Q`.

pub mod error;
pub mod factor;
pub mod field;
pub mod freeness;
pub mod hilbert;
pub mod linalg;
pub mod operators;
pub mod poly;
pub mod preserver;
pub mod realroot;
pub mod text;
pub mod trials;

pub use error::{Error, Result};
pub use field::{
    Automorphism, Field, FieldSpec, PrimeField, QuadElem, QuadraticField, Rational, RationalField,
};
pub use poly::{Polynomial, QPoly};
