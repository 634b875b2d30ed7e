//! Spectral split-step solver for the defocusing critical nonlinear
//! Schrödinger equation `(i d_t + Δ/2) u = u |u|^{2/n}` and diagnostics for
//! its modified (phase-corrected) scattering.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`);
//! the `*64` / `*32` aliases fix the scalar.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conservation;
pub mod error;
pub mod scalar;
pub mod solver;
pub mod operators;
pub mod scattering;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spectral::{ComplexField, Grid, NormReport, Space};

pub type Grid64 = Grid<f64>;
pub type Field64 = ComplexField<f64>;
pub type Grid32 = Grid<f32>;
pub type Field32 = ComplexField<f32>;
