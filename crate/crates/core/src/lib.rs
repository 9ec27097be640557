//! Pseudo-spectral simulation and diagnostics for dissipative equations
//! `u_t + Λ^κ u = G(u)` on periodic domains.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod equations;
pub mod error;
pub mod norms;
pub mod spectral;
pub mod timestepping;

pub use error::{Error, Result};
