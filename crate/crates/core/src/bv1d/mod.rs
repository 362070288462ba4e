//! One-dimensional BV candidates on `(0, l)`.
//!
//! Fields are piecewise linear on a uniform grid, carry an explicit jump
//! list (one jump per cell, at the cell midpoint) and a declared scalar
//! Cantor mass. The Cantor mass is bookkeeping only: it is charged at
//! `G'(0)` in the relaxed energy and counted in the total variation, but the
//! node values describe the absolutely continuous and jump parts alone.

mod energy;
mod field;
mod minimize;
mod oracle;

pub use energy::{bv_norm_1d, energy_relaxed_1d, energy_sharp_1d, EnergyBreakdown};
pub use field::{DisplacementField1D, Jump};
pub use minimize::{minimize_relaxed_1d, sweep_relaxed_1d, Minimizer1D, RECONSTRUCTION_CELLS};
pub use oracle::{brute_force_oracle_1d, OracleResult, MAX_ORACLE_JUMPS, MAX_ORACLE_RESOLUTION};
