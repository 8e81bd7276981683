use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::multiindex::MultiIndex;
use crate::partmap::PartMap;
use crate::{Error, Result};

/// Relative level at which restricted coefficients are rounded to zero.
const ROUNDOFF_CLEAN: f64 = 1e-14;

/// Singular values below `NUMERICAL_ZERO · scale · |ξ|^k` count as zero.
pub const NUMERICAL_ZERO: f64 = 1e-13;

/// A homogeneous order-`k` operator `Σ_{|α|=k} B_α ∂^α` from `ℝ^d`-valued to
/// `ℝ^l`-valued fields on `ℝ^n`.
///
/// Only nonzero coefficients are stored. An operator with `d = 0` is
/// *vacuous*: it arises from restricting to a trivial kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    name: String,
    n: usize,
    d: usize,
    l: usize,
    k: u32,
    coeffs: BTreeMap<MultiIndex, DMatrix<f64>>,
    scale: f64,
}

/// `B[ξ]` together with the frequency it was evaluated at.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub entries: DMatrix<Complex64>,
    pub frequency: Vec<Complex64>,
}

impl SymbolMatrix {
    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }
}

impl OperatorSpec {
    /// Builds an operator from `(α, B_α)` pairs. Every `α` must have order
    /// `k` and every matrix must be `l × d`; at least one coefficient must be
    /// nonzero. Exactly-zero matrices are dropped.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        d: usize,
        l: usize,
        k: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, DMatrix<f64>)>,
    ) -> Result<Self> {
        let spec = Self::build(name.into(), n, d, l, k, coeffs, None)?;
        if spec.coeffs.is_empty() {
            return Err(Error::InvalidOperator(format!(
                "operator `{}` has no nonzero coefficient",
                spec.name
            )));
        }
        Ok(spec)
    }

    fn build(
        name: String,
        n: usize,
        d: usize,
        l: usize,
        k: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, DMatrix<f64>)>,
        parent_scale: Option<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOperator(format!("`{name}`: n must be at least 1")));
        }
        let mut map = BTreeMap::new();
        for (alpha, m) in coeffs {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch {
                    what: "multi-index length",
                    expected: n,
                    got: alpha.dim(),
                });
            }
            if alpha.order() != k {
                return Err(Error::InvalidOperator(format!(
                    "`{name}`: multi-index {:?} has order {}, expected {k}",
                    alpha.exponents(),
                    alpha.order()
                )));
            }
            if m.shape() != (l, d) {
                return Err(Error::InvalidOperator(format!(
                    "`{name}`: coefficient for {:?} has shape {:?}, expected ({l}, {d})",
                    alpha.exponents(),
                    m.shape()
                )));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidOperator(format!(
                    "`{name}`: non-finite coefficient for {:?}",
                    alpha.exponents()
                )));
            }
            if map.contains_key(&alpha) {
                return Err(Error::InvalidOperator(format!(
                    "`{name}`: duplicate multi-index {:?}",
                    alpha.exponents()
                )));
            }
            map.insert(alpha, m);
        }
        let own_scale = map
            .values()
            .flat_map(|m| m.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let scale = parent_scale.unwrap_or(own_scale);
        // entries at roundoff level relative to the (parent) scale are zero
        let floor = ROUNDOFF_CLEAN * scale;
        map.retain(|_, m| {
            m.iter_mut().for_each(|x| {
                if x.abs() <= floor {
                    *x = 0.0
                }
            });
            m.iter().any(|&x| x != 0.0)
        });
        Ok(OperatorSpec {
            name,
            n,
            d,
            l,
            k,
            coeffs: map,
            scale,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &DMatrix<f64>)> {
        self.coeffs.iter()
    }

    /// Coefficient `B_α`, zero when absent.
    pub fn coefficient(&self, alpha: &MultiIndex) -> DMatrix<f64> {
        self.coeffs
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.l, self.d))
    }

    /// Largest absolute coefficient entry at construction time (inherited
    /// by restrictions).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Absolute singular-value floor below which `B[ξ]` is numerically zero.
    pub fn zero_floor(&self, xi: &[f64]) -> f64 {
        let r = libm::sqrt(xi.iter().map(|x| x * x).sum::<f64>());
        NUMERICAL_ZERO * self.scale * libm::pow(r, self.k as f64)
    }

    /// Same as [`OperatorSpec::zero_floor`] for a complex frequency.
    pub fn zero_floor_complex(&self, xi: &[Complex64]) -> f64 {
        let r = libm::sqrt(xi.iter().map(|z| z.norm_sqr()).sum::<f64>());
        NUMERICAL_ZERO * self.scale * libm::pow(r, self.k as f64)
    }

    pub fn is_vacuous(&self) -> bool {
        self.d == 0
    }

    /// True when every stored coefficient vanishes (possible after restriction).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                what: "frequency length",
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// `B[ξ]` at a real frequency.
    pub fn symbol(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(xi.len())?;
        let mut out = DMatrix::zeros(self.l, self.d);
        for (alpha, b) in &self.coeffs {
            let w = alpha.monomial(xi);
            if w != 0.0 {
                out += b * w;
            }
        }
        Ok(out)
    }

    /// `B[ξ]` at a complex frequency.
    pub fn symbol_complex(&self, xi: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_len(xi.len())?;
        let mut out = DMatrix::<Complex64>::zeros(self.l, self.d);
        for (alpha, b) in &self.coeffs {
            let w = alpha.monomial_complex(xi);
            for (o, &c) in out.iter_mut().zip(b.iter()) {
                *o += w * c;
            }
        }
        Ok(out)
    }

    /// `B[ξ] = Σ B_α ξ^α` as a [`SymbolMatrix`].
    pub fn eval_symbol(&self, xi: &[Complex64]) -> Result<SymbolMatrix> {
        Ok(SymbolMatrix {
            entries: self.symbol_complex(xi)?,
            frequency: xi.to_vec(),
        })
    }

    /// Applies the operator to a single constant vector at frequency `ξ`,
    /// i.e. `B[ξ] v`.
    pub fn apply_symbol(&self, xi: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                what: "fiber length",
                expected: self.d,
                got: v.len(),
            });
        }
        let s = self.symbol(xi)?;
        Ok((s * DMatrix::from_column_slice(self.d, 1, v)).iter().copied().collect())
    }
}

/// The operator `B_α ↦ B_α K`, where the columns of `K` are an orthonormal
/// basis of `ker(𝒜)`. Classifying the result answers questions "on
/// `ker(𝒜)`". A trivial kernel gives a vacuous operator with `d = 0`.
pub fn restrict_symbol(spec: &OperatorSpec, part: &PartMap) -> Result<OperatorSpec> {
    if part.d() != spec.d() {
        return Err(Error::DimensionMismatch {
            what: "part map source dimension",
            expected: spec.d(),
            got: part.d(),
        });
    }
    let basis = part.kernel_basis();
    let coeffs = spec
        .coefficients()
        .map(|(a, b)| (a.clone(), b * basis))
        .collect::<Vec<_>>();
    OperatorSpec::build(
        format!("{}|ker({})", spec.name(), part.name()),
        spec.n(),
        basis.ncols(),
        spec.l(),
        spec.k(),
        coeffs,
        Some(spec.scale()),
    )
}
