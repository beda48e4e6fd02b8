//! Solver library for nonlinear fractional three-point boundary value
//! problems
//!
//! ```text
//! a2(ξ) D^α z + a1(ξ) D^β z + a0(ξ) z = g(ξ, z, z'),    ξ ∈ [0,1]
//! z(0) = γ0,  z(θ) = γ1,  z(1) = γ2
//! ```
//!
//! with Caputo derivatives of orders α ∈ (1,2] and β ∈ (0,1], by collocation
//! in a reproducing kernel space built from shifted Legendre polynomials.
//!
//! Module map:
//! - [`dd`] — double-double scalar carrying the polynomial pipeline
//! - [`polybasis`] — polynomial algebra, Legendre basis, inner product,
//!   Gram-Schmidt
//! - [`fracops`] — Gamma, closed-form Caputo derivatives, and the
//!   Riemann-Liouville quadrature oracle
//! - [`rkhs`] — two-point and three-point reproducing kernels
//! - [`solver`] — homogenization, collocation system, linear solve, and the
//!   lagged nonlinear iteration
//! - [`exprlang`] — the expression language of problem-specification files
//! - [`selftest`] — the invariants packaged as runnable pass/fail checks
//!
//! ```
//! use fracbvp_core::solver::{self, SolverConfig};
//!
//! // D^1.75 z + (ξ+1) D^0.75 z + ξ z - z² = f with z(0) = z(1/2) = z(1) = 0
//! let spec = solver::examples::nonlinear_halfpoint(1.75, 0.75);
//! let report = solver::solve(&spec, &SolverConfig::new(5, 9)).unwrap();
//! let worst = report.errors.unwrap().into_iter().fold(0.0_f64, f64::max);
//! assert!(worst < 1e-10);
//! ```

// Validation sites use `!(x > 0.0)`-style comparisons deliberately: they
// reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod exprlang;
pub mod fracops;
pub mod polybasis;
pub mod rkhs;
pub mod selftest;
pub mod solver;

pub use dd::Real;
