use kms_core::{multiindex_enumerate, Complex64};
use rayon::prelude::*;

use super::field::{inverse, transform, SpectrumField, TensorField};
use crate::error::{LabError, Result};

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::InvalidArgument(format!("L^p exponent must lie in [1, ∞), got {p}")));
    }
    Ok(())
}

/// `(Σ_x ‖f(x)‖^p h^n)^{1/p}` with the Euclidean (Frobenius) fiber norm.
/// Points are summed in flat order so the result does not depend on threads.
pub fn lp_norm(field: &TensorField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let grid = field.grid();
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let s: f64 = field.components().iter().map(|c| c[i] * c[i]).sum();
        acc += if p == 2.0 { s } else { s.powf(p / 2.0) };
    }
    Ok((acc * grid.cell_volume()).powf(1.0 / p))
}

/// All order-`m` spectral derivatives `∂^β f`, `|β| = m`, each weighted by
/// `sqrt(m!/β!)` so that `Σ_β (m!/β!) |ξ^β|² = |ξ|^{2m}`. Component layout:
/// fiber component outer, multi-index inner (descending lexicographic).
pub fn derivative_tensor(field: &TensorField, m: u32) -> TensorField {
    if m == 0 {
        return field.clone();
    }
    let grid = field.grid();
    let spectrum = transform(field);
    let betas = multiindex_enumerate(grid.n(), m);
    let phase = match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let freqs: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.frequency_f64(i)).collect();
    let jobs: Vec<(usize, usize)> = (0..field.fiber_dim())
        .flat_map(|c| (0..betas.len()).map(move |b| (c, b)))
        .collect();
    let components: Vec<Vec<Complex64>> = jobs
        .par_iter()
        .map(|&(c, b)| {
            let beta = &betas[b];
            let w = beta.multinomial().sqrt();
            spectrum
                .component(c)
                .iter()
                .zip(&freqs)
                .map(|(z, xi)| *z * phase * (w * beta.monomial(xi)))
                .collect()
        })
        .collect();
    let spectrum = SpectrumField::from_components(grid, components).expect("lengths match the grid");
    inverse(&spectrum)
}

/// `‖D^m f‖_{L^p}` with multinomial multiplicities; `m = 0` is [`lp_norm`].
pub fn homog_sobolev_norm(field: &TensorField, m: u32, p: f64) -> Result<f64> {
    check_exponent(p)?;
    lp_norm(&derivative_tensor(field, m), p)
}

/// `(Σ_{ξ≠0} |ξ|^{2s} ‖f̂(ξ)‖²)^{1/2}` for any real `s`.
pub fn fourier_weight_norm(field: &TensorField, s: f64) -> f64 {
    let spectrum = transform(field);
    let grid = field.grid();
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let r2: f64 = grid.frequency_f64(i).iter().map(|x| x * x).sum();
        let e: f64 = spectrum.components().iter().map(|c| c[i].norm_sqr()).sum();
        acc += r2.powf(s) * e;
    }
    acc.sqrt()
}

/// The `Ẇ^{-s,2}` norm `(Σ_{ξ≠0} |ξ|^{-2s} ‖f̂(ξ)‖²)^{1/2}`, `s ≥ 0`.
pub fn negative_sobolev_norm_l2(field: &TensorField, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(LabError::InvalidArgument(format!("negative Sobolev order must be ≥ 0, got {s}")));
    }
    Ok(fourier_weight_norm(field, -s))
}

/// `Ẇ^{-s,p}`; only `p = 2` has an exact spectral characterization, so any
/// other exponent is refused.
pub fn negative_sobolev_norm(field: &TensorField, s: f64, p: f64) -> Result<f64> {
    if p != 2.0 {
        return Err(LabError::Unsupported(format!(
            "negative-order Sobolev norm at p = {p}; only p = 2 is implemented"
        )));
    }
    negative_sobolev_norm_l2(field, s)
}
