//! Fourier-symbol toolkit for homogeneous constant-coefficient differential
//! operators.
//!
//! An operator `B = Σ_{|α|=k} B_α ∂^α` acting on `ℝ^d`-valued fields over
//! `ℝ^n` is stored as its coefficient family ([`OperatorSpec`]). Everything in
//! this crate works frequency-wise on the symbol `B[ξ] = Σ B_α ξ^α`:
//!
//! * [`classify`] decides ellipticity, constant rank, cancellation and
//!   (sampled) ℂ-ellipticity, optionally after restricting the source to the
//!   kernel of a pointwise map ([`PartMap`]).
//! * [`multiplier`] builds the reconstruction multiplier
//!   `(iξ)^α (B*B)^{-1} B*`, the frequency-wise kernel projector, the
//!   correction symbol `ξ ↦ Π(ξ) P_ker` and the symbol pseudoinverse.
//! * [`exponents`] holds the Sobolev exponent bookkeeping.
//!
//! The crate is `no_std` and only needs `alloc`; IO, grids and the CLI live in
//! the companion `kms-lab` crate.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod catalog;
pub mod classify;
mod error;
pub mod exponents;
pub mod linalg;
pub mod multiindex;
pub mod multiplier;
pub mod operator;
pub mod partmap;
pub mod sampling;

pub use catalog::{catalog_operator, catalog_partmap, catalog_partmap_with_dim};
pub use classify::{
    classify, classify_on_kernel, image_intersection_trace, is_c_elliptic, CEllipticity,
    ClassificationReport,
};
pub use error::{Error, Result};
pub use exponents::{dual_exponent_chain, sobolev_conjugate, DualChain};
pub use multiindex::{multiindex_enumerate, MultiIndex};
pub use multiplier::{
    composed_correction_symbol, kernel_projection_symbol, mihlin_korn_multiplier,
    pseudoinverse_symbol, unrestricted_correction_symbol, MultiplierDescriptor, Provenance,
    ZeroModePolicy,
};
pub use operator::{restrict_symbol, OperatorSpec, SymbolMatrix};
pub use partmap::PartMap;
pub use sampling::{SamplingMode, SphereSampling};

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

/// Relative singular-value cutoff used when extracting `ker(𝒜)` of a part map.
pub const PART_KERNEL_TOL: f64 = 1e-10;

/// Default relative rank tolerance (relative to the per-frequency largest
/// singular value).
pub const RANK_TOL: f64 = 1e-8;

/// Two subspaces share a direction when a principal-angle cosine squared is
/// within this distance of one.
pub const INTERSECTION_TOL: f64 = 1e-8;

/// Condition number of `B*B` above which the reconstruction multiplier is
/// treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;
