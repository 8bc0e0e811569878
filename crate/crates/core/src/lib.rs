//! Leading-order shifts of the hydrogen `ns` levels in rotationally
//! invariant noncommutative space.
//!
//! The central quantity is the dimensionless constant `S₁ₛ(0) ≈ 1.72006`,
//! obtained two ways: from a single convergent integral, and from the
//! η-regularized pair of divergent oscillator-basis series extrapolated to
//! η → 1. [`corrections`] turns it into energy shifts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod corrections;
pub mod error;
pub mod monte_carlo;
pub mod quadrature;
pub mod regularized;
pub mod special_functions;
pub mod summation;
pub mod verification;

pub use error::{Error, Result};
