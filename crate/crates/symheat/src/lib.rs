//! Spherical harmonic analysis on rank-one noncompact symmetric spaces.
//!
//! The crate evaluates spherical functions and the Harish-Chandra c-function,
//! performs spherical transforms on radial grids, synthesizes heat, fractional
//! heat and ball-average kernels, and runs the L^p asymptotic experiments.

// `!(x > 0.0)` is how preconditions reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod specialfn;
pub mod synthesis;
pub mod testfn;
pub mod transform;

pub use error::{Error, Result};
pub use geometry::{LebesgueExponent, RankOneSpace};
pub use num_complex::Complex64;
