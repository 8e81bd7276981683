//! Small dense linear-algebra helpers built on nalgebra's SVD.
//!
//! All routines work for real and complex scalars. Matrices here are tiny
//! (at most a few dozen rows), so nothing is cached or reused.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

/// Scalars with a backing SVD. nalgebra's own bidiagonal SVD returns
/// inaccurate factors for some rank-deficient symbols (e.g. the symmetrized
/// row-wise curl), so the decomposition itself comes from faer.
pub trait SvdScalar: ComplexField<RealField = f64> + Copy {
    /// `(σ, U, V)` with `U` square `rows × rows`, `V` square `cols × cols`
    /// and `min(rows, cols)` singular values. `None` if faer fails.
    fn full_svd(a: &DMatrix<Self>) -> Option<(Vec<f64>, DMatrix<Self>, DMatrix<Self>)>;
}

macro_rules! faer_svd {
    ($t:ty, $re:expr) => {
        impl SvdScalar for $t {
            fn full_svd(a: &DMatrix<Self>) -> Option<(Vec<f64>, DMatrix<Self>, DMatrix<Self>)> {
                let (rows, cols) = a.shape();
                let m = faer::Mat::<$t>::from_fn(rows, cols, |i, j| a[(i, j)]);
                let svd = m.svd().ok()?;
                let s = svd.S().column_vector();
                let sv = (0..s.nrows()).map(|i| $re(s[i])).collect();
                let (u, v) = (svd.U(), svd.V());
                Some((
                    sv,
                    DMatrix::from_fn(rows, rows, |i, j| u[(i, j)]),
                    DMatrix::from_fn(cols, cols, |i, j| v[(i, j)]),
                ))
            }
        }
    };
}

faer_svd!(f64, |x: f64| x);
faer_svd!(Complex64, |x: Complex64| x.re);

/// Singular value decomposition with singular values sorted descending and a
/// complete right basis.
///
/// `v` is always `cols × cols`; when the input has fewer rows than columns the
/// missing singular values are reported as zero. `u` is `rows × cols`; its
/// columns are meaningful only where the singular value is nonzero.
#[derive(Clone, Debug)]
pub struct SortedSvd<T: ComplexField> {
    pub singular_values: Vec<f64>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

impl<T: SvdScalar> SortedSvd<T> {
    pub fn new(a: &DMatrix<T>) -> Self {
        let (rows, cols) = a.shape();
        if cols == 0 || rows == 0 {
            return SortedSvd {
                singular_values: vec![0.0; cols],
                u: DMatrix::zeros(rows, cols),
                v: DMatrix::identity(cols, cols),
            };
        }
        let (mut sv, u_full, v_full) = T::full_svd(a).unwrap_or_else(|| nalgebra_svd(a));
        sv.resize(cols, 0.0);

        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(core::cmp::Ordering::Equal));

        let mut u = DMatrix::<T>::zeros(rows, cols);
        let mut v = DMatrix::<T>::zeros(cols, cols);
        let mut singular_values = Vec::with_capacity(cols);
        for (dst, &src) in order.iter().enumerate() {
            singular_values.push(sv[src]);
            if src < u_full.ncols() {
                u.set_column(dst, &u_full.column(src));
            }
            v.set_column(dst, &v_full.column(src));
        }
        SortedSvd {
            singular_values,
            u,
            v,
        }
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `rel_tol × σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        self.rank_with_floor(rel_tol, 0.0)
    }

    /// Number of singular values strictly above
    /// `max(rel_tol × σ_max, floor)`.
    pub fn rank_with_floor(&self, rel_tol: f64, floor: f64) -> usize {
        let cut = (rel_tol * self.max_singular_value()).max(floor);
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    /// Orthonormal basis (as columns) of the right singular directions with
    /// index `>= from`.
    pub fn trailing_right(&self, from: usize) -> DMatrix<T> {
        let cols = self.v.ncols();
        self.v.columns(from, cols - from).into_owned()
    }

    /// Orthonormal basis of the first `count` left singular directions.
    pub fn leading_left(&self, count: usize) -> DMatrix<T> {
        self.u.columns(0, count).into_owned()
    }

    /// Moore–Penrose pseudoinverse keeping exactly the `rank` leading
    /// singular triples.
    pub fn pseudo_inverse(&self, rank: usize) -> DMatrix<T> {
        let (rows, cols) = (self.u.nrows(), self.v.nrows());
        let mut out = DMatrix::<T>::zeros(cols, rows);
        for s in 0..rank {
            let inv = T::from_real(1.0 / self.singular_values[s]);
            let vs = self.v.column(s);
            let us = self.u.column(s);
            for i in 0..cols {
                let vi = vs[i].clone() * inv.clone();
                for j in 0..rows {
                    out[(i, j)] += vi.clone() * us[j].clone().conjugate();
                }
            }
        }
        out
    }
}

/// Fallback when faer reports non-convergence: nalgebra on the matrix padded
/// to at least square, so that `V` is complete.
fn nalgebra_svd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>, DMatrix<T>) {
    let (rows, cols) = a.shape();
    let padded_rows = rows.max(cols);
    let mut padded = DMatrix::<T>::zeros(padded_rows, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(a);
    let svd = padded.svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").adjoint();
    let sv = svd.singular_values.iter().copied().collect();
    (sv, u.rows(0, rows).into_owned(), v)
}

/// Orthonormal basis of `ker(a)` using a relative singular-value cutoff.
pub fn kernel_basis<T: SvdScalar>(a: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    let svd = SortedSvd::new(a);
    let r = svd.rank(rel_tol);
    svd.trailing_right(r)
}

/// Orthonormal basis of `Im(a)` using a relative singular-value cutoff.
pub fn image_basis<T: SvdScalar>(a: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    let svd = SortedSvd::new(a);
    let r = svd.rank(rel_tol);
    svd.leading_left(r)
}

/// Orthogonal projector `Q Q*` onto the span of orthonormal columns `Q`.
pub fn projector<T: ComplexField<RealField = f64>>(basis: &DMatrix<T>) -> DMatrix<T> {
    basis * basis.adjoint()
}

/// Orthonormal basis of `span(w) ∩ span(u)` for orthonormal column sets.
///
/// The squared principal-angle cosines are the eigenvalues of `P_W P_U P_W`
/// on `span(w)`; directions whose value is within `tol` of one are shared.
pub fn intersect_subspaces<T: SvdScalar>(
    w: &DMatrix<T>,
    u: &DMatrix<T>,
    tol: f64,
) -> DMatrix<T> {
    let dim = w.nrows();
    if w.ncols() == 0 || u.ncols() == 0 {
        return DMatrix::zeros(dim, 0);
    }
    let cross = w.adjoint() * u;
    let svd = SortedSvd::new(&cross.adjoint());
    // right singular vectors of (WᴴU)ᴴ = left singular vectors of WᴴU, living in span(W) coordinates
    let shared = svd
        .singular_values
        .iter()
        .take_while(|&&c| c * c >= 1.0 - tol)
        .count();
    w * svd.v.columns(0, shared)
}

/// Frobenius norm.
pub fn frobenius<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    libm::sqrt(a.iter().map(|x| x.clone().modulus_squared()).sum::<f64>())
}

/// Spectral norm (largest singular value).
pub fn spectral_norm<T: SvdScalar>(a: &DMatrix<T>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SortedSvd::new(a).max_singular_value()
}
