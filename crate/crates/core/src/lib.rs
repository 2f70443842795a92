//! Numerical function theory on the unit disk: Orlicz sequence norms and
//! Legendre conjugates, majorants, outer and inner function synthesis, Clark
//! measures, weighted Bloch diagnostics, simultaneous approximation on arcs
//! and finite model spaces.
//!
//! Angles are measured in turns throughout (`θ ∈ [0, 1)` ↔ `e^{2πiθ}`), and
//! the coefficient convention for measures is `μ̂(n) = ∫ ζ̄ⁿ dμ`, so the
//! Cauchy transform `∫ dμ(ζ)/(1 − ζ̄z)` is the generating function of `μ̂`.

pub mod analytic;
pub mod bloch;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod innerouter;
pub mod majorants;
pub mod modelspace;
pub mod orlicz;
#[cfg(test)]
mod properties;
pub mod saconstruct;

pub use error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;
