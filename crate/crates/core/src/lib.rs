//! Operator calculus on `ℚ[x₁,…,xₙ]`.
//!
//! - [`poly`]: exact sparse polynomials.
//! - [`operator`]: canonical form `T = Σ q_α ∂^α`, application, recovery from
//!   an action, point specialization `T_y`, finite-rank operators.
//! - [`diagonal`]: diagonal operators and the `t ↔ c` binomial transforms.
//! - [`constgroup`]: constant-coefficient operators with exact `exp`/`log`.
//! - [`membership`]: invariant-subspace certificates for well-defined `e^{tA}`.
//! - [`moment`]: truncated moment-matrix tests with witness certificates.
//! - [`levy`]: generators built from Lévy–Khinchin triplets.
//! - [`json`]: the file formats shared with the command-line tool.

pub mod constgroup;
pub mod diagonal;
pub mod error;
pub mod exponent;
pub mod json;
pub mod levy;
pub mod linalg;
pub mod membership;
pub mod moment;
pub mod operator;
pub mod poly;

pub use constgroup::{ConstKind, ConstOperator};
pub use diagonal::{DiagonalSequence, SequenceKind};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use operator::{canonical_from_action, AtomicFunctional, DiffOperator, FiniteRankOperator};
pub use poly::{ApproxPolynomial, Degree, Polynomial};

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;
