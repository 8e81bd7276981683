use kms_core::{Complex64, DMatrix, MultiplierDescriptor, OperatorSpec};
use rayon::prelude::*;

use super::field::{inverse, transform, SpectrumField, TensorField};
use super::grid::TorusGrid;
use crate::error::{LabError, Result};

/// A multiplier evaluated once at every frequency of a grid, stored as
/// `phase(ξ) · R(ξ)` with `R` real. The zero frequency is always annihilated.
#[derive(Clone, Debug)]
pub struct AssembledMultiplier {
    grid: TorusGrid,
    rows: usize,
    cols: usize,
    phases: Vec<Complex64>,
    matrices: Vec<DMatrix<f64>>,
    identically_zero: bool,
}

fn first_error<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

impl AssembledMultiplier {
    pub fn from_descriptor(desc: &MultiplierDescriptor, grid: TorusGrid) -> Result<Self> {
        if desc.n() != grid.n() {
            return Err(LabError::InvalidArgument(format!(
                "multiplier lives in dimension {}, grid in {}",
                desc.n(),
                grid.n()
            )));
        }
        let (rows, cols) = desc.shape();
        let evaluated: Vec<Result<(Complex64, DMatrix<f64>)>> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return Ok((Complex64::new(0.0, 0.0), DMatrix::zeros(rows, cols)));
                }
                Ok(desc.evaluate_factored(&grid.frequency_f64(i))?)
            })
            .collect();
        let (phases, matrices) = first_error(evaluated)?.into_iter().unzip();
        Ok(AssembledMultiplier {
            grid,
            rows,
            cols,
            phases,
            matrices,
            identically_zero: desc.is_identically_zero(),
        })
    }

    /// `ξ ↦ i^k B[ξ]`, the multiplier of the differential operator itself.
    pub fn from_operator(spec: &OperatorSpec, grid: TorusGrid) -> Result<Self> {
        if spec.n() != grid.n() {
            return Err(LabError::InvalidArgument(format!(
                "operator `{}` lives in dimension {}, grid in {}",
                spec.name(),
                spec.n(),
                grid.n()
            )));
        }
        let phase = match spec.k() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let evaluated: Vec<Result<DMatrix<f64>>> = (0..grid.len())
            .into_par_iter()
            .map(|i| Ok(spec.symbol(&grid.frequency_f64(i))?))
            .collect();
        let matrices = first_error(evaluated)?;
        let mut phases = vec![phase; grid.len()];
        phases[0] = Complex64::new(0.0, 0.0);
        Ok(AssembledMultiplier {
            grid,
            rows: spec.l(),
            cols: spec.d(),
            phases,
            matrices,
            identically_zero: spec.is_zero(),
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.identically_zero
    }

    pub fn phase(&self, flat: usize) -> Complex64 {
        self.phases[flat]
    }

    pub fn real_part_matrix(&self, flat: usize) -> &DMatrix<f64> {
        &self.matrices[flat]
    }

    pub fn matrix(&self, flat: usize) -> DMatrix<Complex64> {
        let c = self.phases[flat];
        self.matrices[flat].map(|x| c * x)
    }

    /// Largest Frobenius norm over all frequencies.
    pub fn max_frobenius(&self) -> f64 {
        self.matrices.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn apply_spectrum(&self, spectrum: &SpectrumField) -> Result<SpectrumField> {
        if spectrum.grid() != self.grid || spectrum.fiber_dim() != self.cols {
            return Err(LabError::InvalidArgument(format!(
                "multiplier of shape {}×{} on {:?} cannot act on a {}-vector field on {:?}",
                self.rows,
                self.cols,
                self.grid,
                spectrum.fiber_dim(),
                spectrum.grid()
            )));
        }
        let per_frequency: Vec<Vec<Complex64>> = (0..self.grid.len())
            .into_par_iter()
            .map(|i| {
                let zero = Complex64::new(0.0, 0.0);
                let mut out = vec![zero; self.rows];
                if i == 0 {
                    return out;
                }
                let m = &self.matrices[i];
                let phase = self.phases[i];
                for (r, o) in out.iter_mut().enumerate() {
                    let mut acc = zero;
                    for c in 0..self.cols {
                        acc += spectrum.component(c)[i] * m[(r, c)];
                    }
                    *o = phase * acc;
                }
                out
            })
            .collect();
        let mut components = vec![vec![Complex64::new(0.0, 0.0); self.grid.len()]; self.rows];
        for (i, v) in per_frequency.into_iter().enumerate() {
            for (r, z) in v.into_iter().enumerate() {
                components[r][i] = z;
            }
        }
        SpectrumField::from_components(self.grid, components)
    }

    pub fn apply(&self, field: &TensorField) -> Result<TensorField> {
        if field.grid() == self.grid && field.fiber_dim() == self.cols && self.identically_zero {
            return Ok(TensorField::zeros(self.grid, self.rows));
        }
        let spectrum = self.apply_spectrum(&transform(field))?;
        Ok(inverse(&spectrum))
    }
}

/// Spectral differentiation: the coefficient at ξ becomes `B[iξ] f̂(ξ)`.
pub fn apply_operator(spec: &OperatorSpec, field: &TensorField) -> Result<TensorField> {
    if field.fiber_dim() != spec.d() {
        return Err(LabError::Core(kms_core::Error::DimensionMismatch {
            what: "field fiber dimension",
            expected: spec.d(),
            got: field.fiber_dim(),
        }));
    }
    AssembledMultiplier::from_operator(spec, field.grid())?.apply(field)
}

/// Frequency-wise multiplication by `desc.evaluate(ξ)`, annihilating ξ = 0.
pub fn apply_multiplier(desc: &MultiplierDescriptor, field: &TensorField) -> Result<TensorField> {
    if field.fiber_dim() != desc.shape().1 {
        return Err(LabError::Core(kms_core::Error::DimensionMismatch {
            what: "field fiber dimension",
            expected: desc.shape().1,
            got: field.fiber_dim(),
        }));
    }
    AssembledMultiplier::from_descriptor(desc, field.grid())?.apply(field)
}
