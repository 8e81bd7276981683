use kms_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::field::{inverse, SpectrumField, TensorField};
use super::grid::TorusGrid;
use crate::error::{LabError, Result};

/// Smooth periodic envelope `exp(κ Σ_i (cos(x_i − c_i) − 1))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub center: Vec<f64>,
    pub concentration: f64,
}

/// Gaussian coefficients on `0 < |ξ|_∞ ≤ cutoff`, real part of the inverse
/// transform, projected to zero mean.
pub fn random_bandlimited(grid: TorusGrid, d: usize, cutoff: usize, seed: u64) -> Result<TensorField> {
    if cutoff == 0 || cutoff >= grid.points_per_axis() / 2 {
        return Err(LabError::InvalidArgument(format!(
            "cutoff must lie in [1, M/2) = [1, {}), got {cutoff}",
            grid.points_per_axis() / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = SpectrumField::zeros(grid, d);
    let zero = Complex64::new(0.0, 0.0);
    for i in 1..grid.len() {
        let xi = grid.frequency(i);
        let inside = xi.iter().all(|x| x.unsigned_abs() as usize <= cutoff);
        let value: Vec<Complex64> = if inside {
            (0..d)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        } else {
            vec![zero; d]
        };
        spectrum.set(i, &value);
    }
    Ok(inverse(&spectrum).zero_mean())
}

fn check_frequency(grid: TorusGrid, xi: &[i64]) -> Result<()> {
    if xi.len() != grid.n() {
        return Err(LabError::InvalidArgument(format!(
            "frequency has {} entries, grid dimension is {}",
            xi.len(),
            grid.n()
        )));
    }
    if xi.iter().all(|&x| x == 0) {
        return Err(LabError::InvalidArgument("plane wave frequency must be nonzero".into()));
    }
    let half = (grid.points_per_axis() / 2) as i64;
    if xi.iter().any(|&x| x.abs() >= half) {
        return Err(LabError::InvalidArgument(format!(
            "frequency {xi:?} is not a non-Nyquist grid frequency (|ξ_i| < {half})"
        )));
    }
    Ok(())
}

/// `v cos(ξ₀·x)`, optionally times an [`Envelope`], projected to zero mean.
pub fn plane_wave_field(grid: TorusGrid, xi0: &[i64], v: &[f64], envelope: Option<&Envelope>) -> Result<TensorField> {
    check_frequency(grid, xi0)?;
    if let Some(env) = envelope {
        if env.center.len() != grid.n() || !(env.concentration >= 0.0) {
            return Err(LabError::InvalidArgument("envelope center/concentration malformed".into()));
        }
    }
    let freq: Vec<f64> = xi0.iter().map(|&x| x as f64).collect();
    let field = TensorField::from_fn(grid, v.len(), |x| {
        let phase: f64 = freq.iter().zip(x).map(|(a, b)| a * b).sum();
        let mut amp = phase.cos();
        if let Some(env) = envelope {
            let s: f64 = x.iter().zip(&env.center).map(|(xi, ci)| (xi - ci).cos() - 1.0).sum();
            amp *= (env.concentration * s).exp();
        }
        v.iter().map(|c| c * amp).collect()
    })?;
    Ok(if envelope.is_some() { field.zero_mean() } else { field })
}

/// Shortest distance on the circle of length 2π.
pub fn periodic_offset(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = (a - b).rem_euclid(two_pi);
    if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// Standard bump profile `exp(1 − 1/(1 − (r/w)²))` for `r < w`, else 0.
pub fn bump_profile(r: f64, width: f64) -> f64 {
    let t = r / width;
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// `v φ(|x − c|)` with periodic distance and the profile of [`bump_profile`],
/// projected to zero mean.
pub fn bump_field(grid: TorusGrid, center: &[f64], width: f64, v: &[f64]) -> Result<TensorField> {
    if center.len() != grid.n() {
        return Err(LabError::InvalidArgument("bump center dimension differs from grid".into()));
    }
    if !(width > 0.0 && width < std::f64::consts::PI) {
        return Err(LabError::InvalidArgument(format!("bump width must lie in (0, π), got {width}")));
    }
    Ok(TensorField::from_fn(grid, v.len(), |x| {
        let r = x
            .iter()
            .zip(center)
            .map(|(a, b)| periodic_offset(*a, *b).powi(2))
            .sum::<f64>()
            .sqrt();
        let amp = bump_profile(r, width);
        v.iter().map(|c| c * amp).collect()
    })?
    .zero_mean())
}
