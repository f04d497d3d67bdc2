//! Kepler monopole system in generalized Taub-NUT space.
//!
//! Bound-state energies are available three ways: closed-form solution of
//! the separated equations ([`spectrum`]), finite-dimensional
//! representations of the quadratic symmetry algebra ([`qalgebra`]), and
//! direct finite-difference eigensolves of the separated ODEs ([`sturm`]).
//! [`wavefunctions`] evaluates and normalizes the analytic eigenfunctions and
//! measures how well they satisfy their ODEs.
//!
//! All quantities are dimensionless (ħ = 1).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod model;
pub mod qalgebra;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;
pub mod sturm;
pub mod wavefunctions;

pub use error::{Error, Result};
pub use model::{ModelParams, Preset, Sector};
