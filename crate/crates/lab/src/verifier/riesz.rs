use kms_core::linalg::frobenius;
use kms_core::{
    catalog_operator, catalog_partmap, composed_correction_symbol, unrestricted_correction_symbol, Complex64,
    DMatrix, OperatorSpec, PartMap,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::torus::{inverse, periodic_offset, transform, AssembledMultiplier, SpectrumField, TensorField, TorusGrid};

/// Volume of the unit ball in `ℝ^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub n: usize,
    pub omega_n: f64,
}

impl KernelConstants {
    pub fn new(n: usize) -> Self {
        // ω_0 = 1, ω_1 = 2, ω_n = 2π ω_{n−2} / n
        let mut even = 1.0;
        let mut odd = 2.0;
        let mut j = 1;
        while j < n {
            j += 1;
            if j % 2 == 0 {
                even *= 2.0 * std::f64::consts::PI / j as f64;
            } else {
                odd *= 2.0 * std::f64::consts::PI / j as f64;
            }
        }
        let omega_n = if n % 2 == 0 { even } else { odd };
        KernelConstants { n, omega_n }
    }

    /// `∇Γ(z) = z / (n ω_n |z|^n)`, the gradient of the Newtonian potential.
    pub fn grad_newton(&self, z: &[f64]) -> Vec<f64> {
        let r = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        let c = 1.0 / (self.n as f64 * self.omega_n * r.powi(self.n as i32));
        z.iter().map(|x| c * x).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrosscheckMode {
    Symbol,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszCrosscheck {
    pub mode: CrosscheckMode,
    pub points_per_axis: usize,
    /// Symbol mode: `max_ξ ‖U(ξ) − R(ξ)·dev‖_F` over all nonzero grid
    /// frequencies. Quadrature mode: `max_x ‖Q(x) − S(x)‖_F / max_x ‖S(x)‖_F`.
    pub max_deviation: f64,
    pub frequencies_checked: usize,
    pub evaluation_points: Vec<Vec<f64>>,
    /// Largest magnitude of the spectral correction output (grid maximum in
    /// symbol mode, evaluation-point maximum in quadrature mode).
    pub spectral_output_max: f64,
    pub quadrature_output_max: Option<f64>,
    /// Per evaluation point, row-major `3×3` (quadrature mode only).
    pub spectral_values: Vec<Vec<f64>>,
    pub quadrature_values: Vec<Vec<f64>>,
    /// How far the correction restricted to `ker tr` is from the same closed
    /// form (informational: the two differ by design).
    pub restricted_correction_deviation: Option<f64>,
}

fn check_pair(part: &PartMap, operator: &OperatorSpec) -> Result<()> {
    let tr = catalog_partmap("tr", 3)?;
    let curl = catalog_operator("curl_matrix_rowwise", 3)?;
    let same_op = operator.n() == 3
        && operator.d() == 9
        && operator.l() == 9
        && operator.coefficients().count() == curl.coefficients().count()
        && operator.coefficients().zip(curl.coefficients()).all(|(a, b)| a == b);
    if part.matrix() != tr.matrix() || !same_op {
        return Err(LabError::InvalidArgument(format!(
            "the Riesz cross-check is defined for 𝒜 = tr and B = curl_matrix_rowwise, got `{}` and `{}`",
            part.name(),
            operator.name()
        )));
    }
    Ok(())
}

/// `(R(ξ)·dev)` for row-wise `R P = P ξξᵀ/|ξ|²` on row-major `3×3`.
pub fn riesz_closed_form(xi: &[f64]) -> DMatrix<f64> {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let mut r = DMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            for m in 0..3 {
                r[(i * 3 + j, i * 3 + m)] = xi[j] * xi[m] / r2;
            }
        }
    }
    let mut dev = DMatrix::<f64>::identity(9, 9);
    for a in 0..3 {
        for b in 0..3 {
            dev[(a * 4, b * 4)] -= 1.0 / 3.0;
        }
    }
    r * dev
}

/// Largest `‖U(ξ) − R(ξ)·dev‖_F` over the given frequencies, with `U` the
/// unrestricted correction symbol of (tr, Curl). Also returns the same
/// distance for the restricted correction.
pub fn symbol_deviation(frequencies: &[Vec<f64>]) -> Result<(f64, f64)> {
    let curl = catalog_operator("curl_matrix_rowwise", 3)?;
    let tr = catalog_partmap("tr", 3)?;
    let unrestricted = unrestricted_correction_symbol(&curl, &tr, 6)?;
    let restricted = composed_correction_symbol(&curl, &tr, 6)?;
    let results: Vec<Result<(f64, f64)>> = frequencies
        .par_iter()
        .map(|xi| {
            let closed = riesz_closed_form(xi);
            let (_, u) = unrestricted.evaluate_factored(xi)?;
            let (_, c) = restricted.evaluate_factored(xi)?;
            Ok((frobenius(&(u - &closed)), frobenius(&(c - &closed))))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64);
    for r in results {
        let (a, b) = r?;
        worst = (worst.0.max(a), worst.1.max(b));
    }
    Ok(worst)
}

/// Ten points at distance `radius` from `center`: `±e_i` and four diagonals.
pub fn default_evaluation_points(center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let s = 1.0 / 3f64.sqrt();
    let dirs: [[f64; 3]; 10] = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [s, s, s],
        [-s, s, s],
        [s, -s, s],
        [s, s, -s],
    ];
    dirs.iter()
        .map(|d| d.iter().zip(center).map(|(a, c)| c + radius * a).collect())
        .collect()
}

/// Compares the spectral correction `Π_B 𝒫_ker(tr) P` with its closed form.
///
/// Symbol mode checks the multiplier against `R(ξ)·dev` at every nonzero
/// grid frequency. Quadrature mode evaluates
/// `Q(x)_{ij} = Σ_y (Div dev P)_i(y) ∇Γ(x − y)_j h³` by direct summation
/// (whole-space kernel, nearest periodic image) and compares with the
/// spectral series at the evaluation points; the periodic Green's function
/// differs from the whole-space one, so only rough agreement is expected.
pub fn curl_riesz_crosscheck(
    part: &PartMap,
    operator: &OperatorSpec,
    field: &TensorField,
    eval_points: &[Vec<f64>],
    mode: CrosscheckMode,
) -> Result<RieszCrosscheck> {
    check_pair(part, operator)?;
    let grid = field.grid();
    if grid.n() != 3 || field.fiber_dim() != 9 {
        return Err(LabError::InvalidArgument("the Riesz cross-check needs a 3×3 field on a 3-D grid".into()));
    }
    if eval_points.len() > 10 || eval_points.iter().any(|x| x.len() != 3) {
        return Err(LabError::InvalidArgument("at most 10 evaluation points in ℝ³".into()));
    }
    let correction = unrestricted_correction_symbol(operator, part, 6)?;
    let assembled = AssembledMultiplier::from_descriptor(&correction, grid)?;
    match mode {
        CrosscheckMode::Symbol => {
            let freqs: Vec<Vec<f64>> = (1..grid.len()).map(|i| grid.frequency_f64(i)).collect();
            let (dev_u, dev_r) = symbol_deviation(&freqs)?;
            let out = assembled.apply(field)?;
            Ok(RieszCrosscheck {
                mode,
                points_per_axis: grid.points_per_axis(),
                max_deviation: dev_u,
                frequencies_checked: freqs.len(),
                evaluation_points: Vec::new(),
                spectral_output_max: out.max_abs(),
                quadrature_output_max: None,
                spectral_values: Vec::new(),
                quadrature_values: Vec::new(),
                restricted_correction_deviation: Some(dev_r),
            })
        }
        CrosscheckMode::Quadrature => {
            let spectral = spectral_at_points(&assembled, field, eval_points);
            let quadrature = quadrature_at_points(field, eval_points)?;
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            let mut qmax = 0.0f64;
            for (s, q) in spectral.iter().zip(&quadrature) {
                let diff: f64 = s.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(diff);
                scale = scale.max(s.iter().map(|a| a * a).sum::<f64>().sqrt());
                qmax = qmax.max(q.iter().fold(0.0, |m, a| m.max(a.abs())));
            }
            let smax = spectral.iter().flatten().fold(0.0f64, |m, a| m.max(a.abs()));
            Ok(RieszCrosscheck {
                mode,
                points_per_axis: grid.points_per_axis(),
                max_deviation: if scale > 1e-14 { worst / scale } else { worst },
                frequencies_checked: 0,
                evaluation_points: eval_points.to_vec(),
                spectral_output_max: smax,
                quadrature_output_max: Some(qmax),
                spectral_values: spectral,
                quadrature_values: quadrature,
                restricted_correction_deviation: None,
            })
        }
    }
}

/// The multiplier output as a trigonometric series evaluated off-grid.
fn spectral_at_points(assembled: &AssembledMultiplier, field: &TensorField, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let out = assembled.apply_spectrum(&transform(field)).expect("shapes checked");
    series_at_points(&out, points)
}

fn series_at_points(spectrum: &SpectrumField, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let grid = spectrum.grid();
    let norm = (2.0 * std::f64::consts::PI).powf(-(grid.n() as f64) / 2.0);
    let freqs: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.frequency_f64(i)).collect();
    points
        .par_iter()
        .map(|x| {
            let waves: Vec<Complex64> = freqs
                .iter()
                .map(|xi| {
                    let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                    Complex64::new(phase.cos(), phase.sin())
                })
                .collect();
            (0..spectrum.fiber_dim())
                .map(|c| {
                    let acc: Complex64 = spectrum.component(c).iter().zip(&waves).map(|(a, w)| a * w).sum();
                    norm * acc.re
                })
                .collect()
        })
        .collect()
}

/// Direct sum of `g(y) ∇Γ(x − y) h³` with `g = Div dev P`, over the lattice
/// `y = x + h(j + ½)` that puts `x` at a cell centre of a cube of side `2π`.
/// `g` on that lattice is read off the trigonometric interpolant by a phase
/// shift. The lattice is symmetric about `x`, so the odd kernel sums to
/// zero on constants and no node comes closer than `√3 h / 2`.
fn quadrature_at_points(field: &TensorField, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let grid = field.grid();
    let dev = catalog_partmap("dev", 3)?;
    let dev_p = field.map_pointwise(dev.matrix())?;
    let div = catalog_operator("div_matrix_rowwise", 3)?;
    let g_hat = AssembledMultiplier::from_operator(&div, grid)?.apply_spectrum(&transform(&dev_p))?;
    let kernel = KernelConstants::new(3);
    let h = grid.spacing();
    let h3 = grid.cell_volume();
    let offsets: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| grid.point(i).iter().map(|y| -(y + 0.5 * h)).map(|z| periodic_offset(z, 0.0)).collect())
        .collect();
    let weights: Vec<Vec<f64>> = offsets.iter().map(|z| kernel.grad_newton(z)).collect();
    points
        .iter()
        .map(|x| {
            let shift: Vec<f64> = x.iter().map(|c| c + 0.5 * h).collect();
            let phases: Vec<Complex64> = (0..grid.len())
                .map(|i| {
                    let t: f64 = grid.frequency_f64(i).iter().zip(&shift).map(|(a, b)| a * b).sum();
                    Complex64::new(t.cos(), t.sin())
                })
                .collect();
            let shifted: Vec<Vec<Complex64>> = g_hat
                .components()
                .iter()
                .map(|c| c.iter().zip(&phases).map(|(a, w)| a * w).collect())
                .collect();
            let g = inverse(&SpectrumField::from_components(grid, shifted)?);
            let mut q = vec![0.0; 9];
            for (i, k) in weights.iter().enumerate() {
                for a in 0..3 {
                    let ga = g.component(a)[i] * h3;
                    for b in 0..3 {
                        q[a * 3 + b] += ga * k[b];
                    }
                }
            }
            Ok(q)
        })
        .collect()
}

/// Grid for the default quadrature check.
pub fn default_quadrature_grid() -> TorusGrid {
    TorusGrid::new(3, 32).expect("valid grid")
}
