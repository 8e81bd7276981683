//! Standard operators and pointwise maps.
//!
//! Matrix-valued fields `P ∈ ℝ^{m×n}` are flattened row-major: entry
//! `(i, j)` sits at index `i·n + j`. Curl of a matrix field is taken row by
//! row, `(Curl P)_{i·} = curl(P_{i·})`, so `Curl(Du) = 0` for `(Du)_{ij} = ∂_j u_i`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::multiindex::MultiIndex;
use crate::operator::OperatorSpec;
use crate::partmap::PartMap;
use crate::{Error, Result};

/// Names accepted by [`catalog_operator`].
pub const OPERATOR_NAMES: &[&str] = &[
    "gradient",
    "sym_gradient",
    "curl_vector",
    "curl_matrix_rowwise",
    "divergence",
    "div_matrix_rowwise",
    "sym_curl_matrix",
    "cauchy_riemann",
];

/// Names accepted by [`catalog_partmap`].
pub const PARTMAP_NAMES: &[&str] = &["sym", "dev", "tr", "skew", "identity", "zero"];

/// Levi-Civita symbol on `{0, 1, 2}`.
fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn require_n(name: &str, n: usize, required: usize) -> Result<()> {
    if n != required {
        return Err(Error::IncompatibleDimension {
            name: name.into(),
            required,
            got: n,
        });
    }
    Ok(())
}

fn first_order(
    name: &str,
    n: usize,
    d: usize,
    l: usize,
    mut entry: impl FnMut(usize, usize, usize) -> f64,
) -> Result<OperatorSpec> {
    let coeffs: Vec<_> = (0..n)
        .map(|m| {
            let b = DMatrix::from_fn(l, d, |r, c| entry(m, r, c));
            (MultiIndex::unit(n, m), b)
        })
        .collect();
    OperatorSpec::new(name, n, d, l, 1, coeffs)
}

fn rowwise_curl_entry(m: usize, row: usize, col: usize) -> f64 {
    // (Curl P)_{i j} = Σ ε_{j a b} ∂_a P_{i b}
    let (i, j) = (row / 3, row % 3);
    let (i2, b) = (col / 3, col % 3);
    if i != i2 {
        0.0
    } else {
        levi_civita(j, m, b)
    }
}

/// Standard first-order operators by name.
pub fn catalog_operator(name: &str, n: usize) -> Result<OperatorSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    match name {
        "gradient" => first_order(name, n, 1, n, |m, r, _| delta(m, r)),
        "sym_gradient" => first_order(name, n, n, n * n, |m, r, c| {
            let (i, j) = (r / n, r % n);
            0.5 * (delta(j, m) * delta(i, c) + delta(i, m) * delta(j, c))
        }),
        "curl_vector" => {
            require_n(name, n, 3)?;
            first_order(name, 3, 3, 3, |m, r, c| levi_civita(r, m, c))
        }
        "curl_matrix_rowwise" => {
            require_n(name, n, 3)?;
            first_order(name, 3, 9, 9, rowwise_curl_entry)
        }
        "divergence" => first_order(name, n, n, 1, |m, _, c| delta(m, c)),
        "div_matrix_rowwise" => first_order(name, n, n * n, n, |m, r, c| {
            let (i, j) = (c / n, c % n);
            delta(i, r) * delta(j, m)
        }),
        "sym_curl_matrix" => {
            require_n(name, n, 3)?;
            first_order(name, 3, 9, 9, |m, r, c| {
                let (i, j) = (r / 3, r % 3);
                0.5 * (rowwise_curl_entry(m, r, c) + rowwise_curl_entry(m, j * 3 + i, c))
            })
        }
        "cauchy_riemann" => {
            require_n(name, n, 2)?;
            // (∂_1 u_1 - ∂_2 u_2, ∂_2 u_1 + ∂_1 u_2): the real form of ∂_1 + i ∂_2
            first_order(name, 2, 2, 2, |m, r, c| match (m, r, c) {
                (0, 0, 0) | (0, 1, 1) | (1, 1, 0) => 1.0,
                (1, 0, 1) => -1.0,
                _ => 0.0,
            })
        }
        other => Err(Error::UnknownName(other.into())),
    }
}

/// Pointwise maps on `n × n` matrices (`d = n²`).
pub fn catalog_partmap(name: &str, n: usize) -> Result<PartMap> {
    catalog_partmap_with_dim(name, n, n * n)
}

/// Like [`catalog_partmap`], but `identity` and `zero` act on `ℝ^d` for any
/// `d`. The matrix maps still require `d = n²`.
pub fn catalog_partmap_with_dim(name: &str, n: usize, d: usize) -> Result<PartMap> {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let square = |f: &dyn Fn(usize, usize, usize, usize) -> f64| {
        DMatrix::from_fn(n * n, n * n, |r, c| f(r / n, r % n, c / n, c % n))
    };
    let matrix = match name {
        "identity" => return Ok(PartMap::identity(d)),
        "zero" => return Ok(PartMap::zero(d)),
        _ if !PARTMAP_NAMES.contains(&name) => return Err(Error::UnknownName(name.into())),
        _ if d != n * n => {
            return Err(Error::InvalidArgument(format!(
                "part map `{name}` acts on {n}x{n} matrices (d = {}), got d = {d}",
                n * n
            )))
        }
        "sym" => square(&|i, j, a, b| 0.5 * (delta(i, a) * delta(j, b) + delta(i, b) * delta(j, a))),
        "skew" => square(&|i, j, a, b| 0.5 * (delta(i, a) * delta(j, b) - delta(i, b) * delta(j, a))),
        "dev" => square(&|i, j, a, b| {
            delta(i, a) * delta(j, b) - delta(i, j) * delta(a, b) / n as f64
        }),
        "tr" => DMatrix::from_fn(1, n * n, |_, c| delta(c / n, c % n)),
        _ => unreachable!(),
    };
    PartMap::new(name, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_incompatible() {
        assert!(matches!(catalog_operator("laplacian", 3), Err(Error::UnknownName(_))));
        assert!(matches!(
            catalog_operator("curl_vector", 2),
            Err(Error::IncompatibleDimension { .. })
        ));
        assert!(catalog_partmap("nope", 3).is_err());
        assert!(catalog_partmap_with_dim("sym", 3, 4).is_err());
        assert_eq!(catalog_partmap_with_dim("zero", 3, 1).unwrap().d(), 1);
    }

    #[test]
    fn shapes() {
        let cases = [
            ("gradient", 1, 3),
            ("sym_gradient", 3, 9),
            ("curl_vector", 3, 3),
            ("curl_matrix_rowwise", 9, 9),
            ("divergence", 3, 1),
            ("div_matrix_rowwise", 9, 3),
            ("sym_curl_matrix", 9, 9),
        ];
        for (name, d, l) in cases {
            let op = catalog_operator(name, 3).unwrap();
            assert_eq!((op.d(), op.l(), op.k()), (d, l, 1), "{name}");
        }
    }

    #[test]
    fn curl_of_gradient_symbol_vanishes() {
        // Curl[ξ] ∘ D[ξ] = 0 with D[ξ]u = u ⊗ ξ
        let curl = catalog_operator("curl_matrix_rowwise", 3).unwrap();
        let xi = [0.2, 1.3, -0.7];
        let mut grad = DMatrix::zeros(9, 3);
        for i in 0..3 {
            for j in 0..3 {
                grad[(i * 3 + j, i)] = xi[j];
            }
        }
        assert!((curl.symbol(&xi).unwrap() * grad).norm() < 1e-15);
    }

    #[test]
    fn partmap_kernel_dims() {
        let dims = [("sym", 3), ("skew", 6), ("dev", 1), ("tr", 8), ("identity", 0), ("zero", 9)];
        for (name, k) in dims {
            assert_eq!(catalog_partmap(name, 3).unwrap().kernel_dim(), k, "{name}");
        }
    }
}
