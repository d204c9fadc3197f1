//! Critical dipole moment in one dimension.
//!
//! The crate reproduces the spectrum of the one-dimensional hydrogen atom
//! with ψ(0) = 0, the runaway ground state of the cut-off Coulomb well, and
//! the inverse-square threshold α = 1/4 that fixes the critical point-dipole
//! moment p_crit = πε₀ħ²/(2qm) = q·a_B/8.
//!
//! Modules:
//! - [`units`]: constants, atomic units and the α, ξ reductions
//! - [`potentials`]: the potential families and their domain structure
//! - [`frobenius`]: power-series solutions about the singular point
//! - [`eigensolver`]: finite-difference spectra and the zero-energy node test
//! - [`critical`]: closed-form and numerical critical moments
//! - [`cli`]: the `critdipole` command line

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod critical;
pub mod eigensolver;
pub mod error;
pub mod frobenius;
pub mod output;
pub mod potentials;
pub mod selftest;
pub mod units;

pub use error::{Error, Result};
pub use potentials::PotentialSpec;
pub use units::ConstantSet;
