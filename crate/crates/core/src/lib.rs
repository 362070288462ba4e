//! Cohesive-fracture energies on BV candidates.
//!
//! * [`laws`]: bulk and cohesive densities, the yield strain and the relaxed
//!   envelope.
//! * [`bv1d`]: one-dimensional candidates, their sharp and relaxed energies,
//!   and the reduced Dirichlet minimizer with a lattice oracle.
//! * [`field2d`]: planar fields, the taper profile and radial bump, level-set
//!   extraction and cut-cell quadrature.
//! * [`competitor`]: scaled competitors `w = alpha u` on sublevel, profile and
//!   radial-bump regions, energy gaps, closed-form bounds and certificate
//!   search.
//! * [`scenario`] and [`report`]: batch scenarios and their CSV/JSON output.

// Guards are written as `!(x > 0.0)` so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bv1d;
pub mod competitor;
pub mod error;
pub mod field2d;
pub mod laws;
pub mod parallel;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use parallel::Execution;
