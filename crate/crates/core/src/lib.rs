//! Exact-arithmetic toolkit for rank-three reflective Jacobi forms.
//!
//! The crate builds truncated q-series and two-variable Jacobi-form Fourier
//! expansions over exact rationals, reconstructs the tabulated reflective
//! bases for the nine supported indices, applies the Borcherds-type lift,
//! and reassembles the 29 hyperbolic Kac-Moody denominator forms together
//! with their root-system data.

pub mod classify;
pub mod dataset;
pub mod error;
pub mod jacobi;
pub mod lattice;
pub mod lift;
pub mod linalg;
pub mod qseries;
pub mod reflective;

pub use error::Error;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar used for every coefficient in the crate.
pub type Q = BigRational;

/// Integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Ratio of integers as a rational.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}
