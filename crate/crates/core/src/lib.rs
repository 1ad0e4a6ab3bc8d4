//! Exact arithmetic for generalized Tribonacci numbers.
//!
//! A generalized Tribonacci sequence obeys `T(r) = T(r-1) + T(r-2) + T(r-3)`
//! with arbitrary integer seeds `T(0), T(1), T(2)`, and extends to every
//! integer index. This crate computes its terms exactly and checks a family of
//! polynomial identities among them:
//!
//! - [`sequence`]: term computation (cached iteration, the four-term
//!   alternative recurrence, and companion-matrix powers).
//! - [`identities`]: the square, cross-product and cube identities as
//!   residual templates, plus range verification.
//! - [`sums`]: closed forms for weighted, alternating and strided partial sums
//!   of squares, each paired with a brute-force summation oracle.
//! - [`poly`] and [`genfunc`]: exact polynomials, rational generating
//!   functions and power-series expansion.
//! - [`linalg`] and [`discovery`]: exact integer kernels of sample matrices,
//!   used to rediscover identity coefficient vectors from data.
//! - [`output`]: the JSON record shape shared by the command-line tool.
//!
//! No floating point is used in any identity check. The only `f64` result is
//! [`genfunc::convergence_radius_estimate`].

pub mod discovery;
pub mod genfunc;
pub mod identities;
pub mod linalg;
pub mod output;
pub mod poly;
pub mod rational;
pub mod sequence;
pub mod sums;

pub use discovery::{discover_identity, Discovery, DiscoveryError, KernelBasis, SampleMatrix};
pub use genfunc::RationalFunction;
pub use identities::{builtin_identities, IdentityReport, IdentityTemplate};
pub use output::OutputRecord;
pub use poly::Polynomial;
pub use sequence::{term, term_alt, term_fast, SequenceSpec, TermCache};
pub use sums::{LinearRecurrence, SumError, SumReport, SumVariant};

/// Arbitrary-precision integer used for every sequence value.
pub type ExactInt = num_bigint::BigInt;

/// Exact rational used for sums and series coefficients.
pub type ExactRational = num_rational::BigRational;
