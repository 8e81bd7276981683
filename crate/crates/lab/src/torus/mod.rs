//! Periodic fields on `[0, 2π)^n`: spectral transforms, operator and
//! multiplier application, norms and test-field generators.

mod field;
mod generators;
mod grid;
mod norms;
mod ops;

pub use field::{inverse, inverse_complex, transform, SpectrumField, TensorField};
pub use generators::{bump_field, bump_profile, periodic_offset, plane_wave_field, random_bandlimited, Envelope};
pub use grid::{TorusGrid, MAX_POINTS};
pub use norms::{
    derivative_tensor, fourier_weight_norm, homog_sobolev_norm, lp_norm, negative_sobolev_norm,
    negative_sobolev_norm_l2,
};
pub use ops::{apply_multiplier, apply_operator, AssembledMultiplier};
