//! Exact/floating scalar abstraction with dense polynomials and matrices.
//!
//! Every algebraic formula in [`crate::qalgebra`] is written once over
//! [`Scalar`] and runs both in `f64` and in arbitrary-precision rationals, so
//! identity checks can separate roundoff from formula errors.

mod matrix;
mod poly;
mod scalar;

pub use matrix::DMat;
pub use poly::Poly;
pub use scalar::{rat, Rational, Scalar};
