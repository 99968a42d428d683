//! Coded distributed computing with cubic B-spline reconstruction.
//!
//! The master encodes a dataset of `K` matrix blocks into `N` shares with a
//! Lagrange or Berrut basis, workers evaluate an arbitrary scalar function
//! entrywise, and the master rebuilds `f(X_j)` from any surviving subset of
//! results by natural cubic spline interpolation in a clamped B-spline
//! basis. A Berrut rational decoder is included as a baseline, alongside
//! evaluators for the associated error bounds and a seeded Monte Carlo
//! harness.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod bounds;
pub mod bspline;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod pipeline;

pub use error::{Error, Result};
