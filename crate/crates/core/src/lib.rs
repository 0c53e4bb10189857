//! Harmonic unit vector fields on Euclidean and hyperbolic 3-space.
//!
//! The crate is organised bottom-up:
//!
//! * [`charts`]: coordinate charts, orthonormal frames, finite-difference
//!   scalar and vector calculus (gradient, Laplacian, covariant derivative,
//!   rough Laplacian).
//! * [`fieldlab`]: the catalogue of unit-field families and their bending.
//! * [`pendulum`]: the singular radial ODE `r²V'' + rV' = sin V` behind the
//!   Euclidean `σ_{p,q}` family, by closed form and by shooting.
//! * [`residuals`]: grid-based harmonicity checks.
//! * [`stability`]: second variation of the H-parallel field.
//! * [`flowtrace`]: streamlines and flow diagnostics.
//! * [`repro`]: the reproduction table used by the CLI and the acceptance suite.
//!
//! Laplacians follow the geometer's sign convention `Δf = −div ∇f`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charts;
pub mod error;
pub mod fieldlab;
pub mod flowtrace;
pub mod ode;
pub mod pendulum;
pub mod quad;
pub mod repro;
pub mod residuals;
pub mod stability;

pub use error::{Error, Result};
