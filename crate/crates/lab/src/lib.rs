//! Numerical laboratory for Korn–Maxwell–Sobolev type inequalities on the
//! torus, built on the symbol toolkit in `kms-core`.
//!
//! * [`torus`]: grids, tensor fields, FFT normalization, multipliers, norms
//!   and test-field generators.
//! * [`verifier`]: inequality sides, constant estimates, refinement, the
//!   necessity demonstration and the Curl kernel cross-check.
//! * [`formats`], [`run`], [`report`], [`cli`]: inputs, replayable
//!   requests, JSON reports and the `kms` binary.

pub mod cli;
mod error;
pub mod formats;
pub mod report;
pub mod run;
pub mod torus;
pub mod verifier;

pub use error::{LabError, Result};
