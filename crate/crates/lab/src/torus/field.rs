use std::cell::RefCell;
use std::sync::Arc;

use kms_core::{Complex64, DMatrix};
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::TorusGrid;
use crate::error::{LabError, Result};

/// Real `ℝ^d`-valued samples on a [`TorusGrid`], stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: TorusGrid,
    components: Vec<Vec<f64>>,
}

/// Fourier coefficients of a field, one complex `d`-vector per frequency.
///
/// Normalization: `f̂(ξ) = (2π)^{n/2} M^{-n} Σ_x f(x) e^{-iξ·x}`, the
/// discrete analogue of the unitary transform on `[0, 2π)^n`. With it
/// `Σ_ξ |f̂(ξ)|² = ‖f‖²_{L²}` and `f = (2π)^{-n/2} Σ_ξ f̂(ξ) e^{iξ·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumField {
    grid: TorusGrid,
    components: Vec<Vec<Complex64>>,
}

impl TensorField {
    pub fn zeros(grid: TorusGrid, d: usize) -> Self {
        TensorField {
            grid,
            components: vec![vec![0.0; grid.len()]; d],
        }
    }

    pub fn from_components(grid: TorusGrid, components: Vec<Vec<f64>>) -> Result<Self> {
        for (c, comp) in components.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(LabError::InvalidArgument(format!(
                    "component {c} has {} samples, grid has {}",
                    comp.len(),
                    grid.len()
                )));
            }
            if comp.iter().any(|x| !x.is_finite()) {
                return Err(LabError::InvalidArgument(format!("component {c} has non-finite values")));
            }
        }
        Ok(TensorField { grid, components })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: TorusGrid, d: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let values: Vec<Vec<f64>> = (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i))).collect();
        let mut components = vec![vec![0.0; grid.len()]; d];
        for (i, v) in values.into_iter().enumerate() {
            if v.len() != d {
                return Err(LabError::InvalidArgument(format!("sampler returned {} values, expected {d}", v.len())));
            }
            for (c, x) in v.into_iter().enumerate() {
                components[c][i] = x;
            }
        }
        Self::from_components(grid, components)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub fn value_at(&self, flat: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[flat]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let len = self.grid.len() as f64;
        self.components.iter().map(|c| c.iter().sum::<f64>() / len).collect()
    }

    pub fn zero_mean(mut self) -> Self {
        let mean = self.mean();
        for (comp, mu) in self.components.iter_mut().zip(mean) {
            comp.iter_mut().for_each(|x| *x -= mu);
        }
        self
    }

    pub fn is_zero_mean(&self, tol: f64) -> bool {
        self.mean().iter().all(|m| m.abs() <= tol)
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        if self.grid != other.grid || self.fiber_dim() != other.fiber_dim() {
            return Err(LabError::InvalidArgument(format!(
                "field shapes differ: {:?}×{} vs {:?}×{}",
                self.grid,
                self.fiber_dim(),
                other.grid,
                other.fiber_dim()
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(TensorField {
            grid: self.grid,
            components,
        })
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(TensorField {
            grid: self.grid,
            components,
        })
    }

    pub fn scaled(&self, s: f64) -> TensorField {
        TensorField {
            grid: self.grid,
            components: self.components.iter().map(|c| c.iter().map(|x| s * x).collect()).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &TensorField) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Applies a fixed `N × d` matrix at every point.
    pub fn map_pointwise(&self, matrix: &DMatrix<f64>) -> Result<TensorField> {
        if matrix.ncols() != self.fiber_dim() {
            return Err(LabError::InvalidArgument(format!(
                "pointwise map expects fiber {}, field has {}",
                matrix.ncols(),
                self.fiber_dim()
            )));
        }
        let len = self.grid.len();
        let components = (0..matrix.nrows())
            .map(|r| {
                let mut out = vec![0.0; len];
                for (c, comp) in self.components.iter().enumerate() {
                    let a = matrix[(r, c)];
                    if a != 0.0 {
                        out.iter_mut().zip(comp).for_each(|(o, x)| *o += a * x);
                    }
                }
                out
            })
            .collect();
        Ok(TensorField {
            grid: self.grid,
            components,
        })
    }
}

impl SpectrumField {
    pub fn zeros(grid: TorusGrid, d: usize) -> Self {
        SpectrumField {
            grid,
            components: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; d],
        }
    }

    pub fn from_components(grid: TorusGrid, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(LabError::InvalidArgument("spectrum component length differs from grid".into()));
        }
        Ok(SpectrumField { grid, components })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn coefficient(&self, flat: usize) -> Vec<Complex64> {
        self.components.iter().map(|c| c[flat]).collect()
    }

    /// Coefficient at an integer frequency in `[−M/2, M/2)^n`.
    pub fn at(&self, xi: &[i64]) -> Option<Vec<Complex64>> {
        self.grid.frequency_index(xi).map(|i| self.coefficient(i))
    }

    pub fn set(&mut self, flat: usize, value: &[Complex64]) {
        for (c, v) in self.components.iter_mut().zip(value) {
            c[flat] = *v;
        }
    }

    /// `Σ_ξ ‖f̂(ξ)‖²`.
    pub fn energy(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Largest violation of `f̂(−ξ) = conj f̂(ξ)` over non-Nyquist ξ.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.len() {
            let xi = self.grid.frequency(i);
            if self.grid.is_nyquist(&xi) {
                continue;
            }
            let neg: Vec<i64> = xi.iter().map(|x| -x).collect();
            let j = self.grid.frequency_index(&neg).expect("negation of a non-Nyquist frequency");
            for c in &self.components {
                worst = worst.max((c[i] - c[j].conj()).norm());
            }
        }
        worst
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized n-dimensional DFT in place, one axis at a time.
fn fft_nd(data: &mut [Complex64], grid: TorusGrid, direction: FftDirection) {
    let m = grid.points_per_axis();
    let n = grid.n();
    let fft = plan(m, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let outer = m.pow(axis as u32);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * m * stride + i;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

fn forward_scale(grid: TorusGrid) -> f64 {
    (2.0 * std::f64::consts::PI).powf(grid.n() as f64 / 2.0) / grid.len() as f64
}

fn inverse_scale(grid: TorusGrid) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-(grid.n() as f64) / 2.0)
}

/// Forward transform of a real field.
pub fn transform(field: &TensorField) -> SpectrumField {
    let grid = field.grid();
    let scale = forward_scale(grid);
    let components = field
        .components()
        .par_iter()
        .map(|comp| {
            let mut data: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft_nd(&mut data, grid, FftDirection::Forward);
            data.iter_mut().for_each(|z| *z *= scale);
            data
        })
        .collect();
    SpectrumField { grid, components }
}

/// Inverse transform, keeping complex values.
pub fn inverse_complex(spectrum: &SpectrumField) -> Vec<Vec<Complex64>> {
    let grid = spectrum.grid();
    let scale = inverse_scale(grid);
    spectrum
        .components()
        .par_iter()
        .map(|comp| {
            let mut data = comp.clone();
            fft_nd(&mut data, grid, FftDirection::Inverse);
            data.iter_mut().for_each(|z| *z *= scale);
            data
        })
        .collect()
}

/// Inverse transform followed by taking real parts. For spectra of real
/// fields this is exact up to roundoff; otherwise it keeps the Hermitian
/// part, which in particular drops odd multipliers at Nyquist frequencies.
pub fn inverse(spectrum: &SpectrumField) -> TensorField {
    let components = inverse_complex(spectrum)
        .into_iter()
        .map(|c| c.into_iter().map(|z| z.re).collect())
        .collect();
    TensorField {
        grid: spectrum.grid(),
        components,
    }
}
