use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::linalg::SortedSvd;
use crate::{Error, Result, PART_KERNEL_TOL};

/// A pointwise linear map `𝒜 : ℝ^d → ℝ^N` with its orthogonal kernel
/// projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PartMap {
    name: String,
    matrix: DMatrix<f64>,
    proj_ker: DMatrix<f64>,
    proj_perp: DMatrix<f64>,
    kernel_basis: DMatrix<f64>,
    singular_values: Vec<f64>,
    rank: usize,
}

impl PartMap {
    /// Builds the part map for an `N × d` matrix. `ker(𝒜)` is spanned by the
    /// right singular vectors whose singular value is at most
    /// `1e-10 × σ_max`.
    pub fn new(name: impl Into<String>, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("part map has non-finite entries".into()));
        }
        let d = matrix.ncols();
        let svd = SortedSvd::new(&matrix);
        let rank = svd.rank(PART_KERNEL_TOL);
        let kernel_basis = svd.trailing_right(rank);
        let proj_ker = &kernel_basis * kernel_basis.transpose();
        let proj_perp = DMatrix::identity(d, d) - &proj_ker;
        Ok(PartMap {
            name: name.into(),
            matrix,
            proj_ker,
            proj_perp,
            kernel_basis,
            singular_values: svd.singular_values,
            rank,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new("identity", DMatrix::identity(d, d)).expect("finite")
    }

    pub fn zero(d: usize) -> Self {
        Self::new("zero", DMatrix::zeros(d, d)).expect("finite")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Source dimension `d`.
    pub fn d(&self) -> usize {
        self.matrix.ncols()
    }

    /// Target dimension `N`.
    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn proj_ker(&self) -> &DMatrix<f64> {
        &self.proj_ker
    }

    pub fn proj_perp(&self) -> &DMatrix<f64> {
        &self.proj_perp
    }

    /// Orthonormal `d × dim ker(𝒜)` basis.
    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel_basis
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.ncols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `C_𝒜 = 1 / (smallest nonzero singular value)`, so that
    /// `|P_perp v| ≤ C_𝒜 |𝒜 v|`. `None` when `𝒜 = 0`.
    pub fn injectivity_constant(&self) -> Option<f64> {
        if self.rank == 0 {
            None
        } else {
            Some(1.0 / self.singular_values[self.rank - 1])
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, v)
    }

    pub fn apply_proj_ker(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.proj_ker, v)
    }

    pub fn apply_proj_perp(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.proj_perp, v)
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), v.len(), "fiber length mismatch");
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}
