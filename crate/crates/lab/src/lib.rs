//! Experiment runner for the dissipative pseudo-spectral models in `gevrey-core`.
//! Runs are described by INI files; the same files drive sweeps and the
//! built-in verification suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod initial;
pub mod oracles;
pub mod runner;
pub mod suites;
pub mod sweep;
