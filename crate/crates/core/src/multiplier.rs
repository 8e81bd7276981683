//! Fourier multipliers built from an operator symbol.
//!
//! Every multiplier here has the form `ξ ↦ c(ξ) R(ξ)` with `c` a power of
//! `i` times a real monomial and `R(ξ)` a real matrix, which is what
//! [`MultiplierDescriptor::evaluate_factored`] returns. The zero frequency is
//! always annihilated.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::SortedSvd;
use crate::multiindex::MultiIndex;
use crate::operator::{restrict_symbol, OperatorSpec};
use crate::partmap::PartMap;
use crate::{Error, Result, MAX_GRAM_CONDITION, RANK_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModePolicy {
    Annihilate,
}

/// Which construction produced a multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Identity,
    MihlinKorn { operator: String, alpha: Vec<u32> },
    KernelProjection { operator: String, rank: usize },
    ComposedCorrection { operator: String, part: String, rank: usize },
    UnrestrictedCorrection { operator: String, part: String, rank: usize },
    PseudoInverse { operator: String, rank: usize },
}

#[derive(Clone, Debug)]
enum Kind {
    Identity,
    MihlinKorn { spec: OperatorSpec, alpha: MultiIndex },
    KernelProjection { spec: OperatorSpec, rank: usize },
    /// `K Π_restricted(ξ) Kᵀ`, `K` an orthonormal basis of `ker(𝒜)`.
    Composed { restricted: OperatorSpec, basis: DMatrix<f64>, rank: usize },
    /// `Π_B(ξ) P_ker(𝒜)`.
    Unrestricted { spec: OperatorSpec, proj_ker: DMatrix<f64>, rank: usize },
    PseudoInverse { spec: OperatorSpec, rank: usize },
}

/// A homogeneous matrix-valued Fourier symbol with a declared shape and
/// degree.
#[derive(Clone, Debug)]
pub struct MultiplierDescriptor {
    kind: Kind,
    n: usize,
    rows: usize,
    cols: usize,
    homogeneity_degree: i32,
    zero_mode_policy: ZeroModePolicy,
    provenance: Provenance,
}

impl MultiplierDescriptor {
    /// The identity multiplier on `ℝ^d` (still annihilating `ξ = 0`).
    pub fn identity(n: usize, d: usize) -> Self {
        MultiplierDescriptor {
            kind: Kind::Identity,
            n,
            rows: d,
            cols: d,
            homogeneity_degree: 0,
            zero_mode_policy: ZeroModePolicy::Annihilate,
            provenance: Provenance::Identity,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn homogeneity_degree(&self) -> i32 {
        self.homogeneity_degree
    }
    pub fn zero_mode_policy(&self) -> ZeroModePolicy {
        self.zero_mode_policy
    }
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// True when the symbol is provably zero at every frequency (e.g. the
    /// correction for an operator elliptic on `ker(𝒜)`).
    pub fn is_identically_zero(&self) -> bool {
        match &self.kind {
            Kind::Composed { restricted, rank, .. } => restricted.d() == 0 || *rank == restricted.d(),
            Kind::Unrestricted { spec, proj_ker, rank } => *rank == spec.d() || proj_ker.iter().all(|&x| x == 0.0),
            Kind::KernelProjection { spec, rank } => *rank == spec.d(),
            Kind::PseudoInverse { rank, .. } => *rank == 0,
            _ => false,
        }
    }

    /// `(c, R)` with `evaluate(ξ) = c · R(ξ)`, `R` real.
    pub fn evaluate_factored(&self, xi: &[f64]) -> Result<(Complex64, DMatrix<f64>)> {
        if xi.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "frequency length",
                expected: self.n,
                got: xi.len(),
            });
        }
        let one = Complex64::new(1.0, 0.0);
        if xi.iter().all(|&x| x == 0.0) {
            return Ok((one, DMatrix::zeros(self.rows, self.cols)));
        }
        match &self.kind {
            Kind::Identity => Ok((one, DMatrix::identity(self.rows, self.cols))),
            Kind::MihlinKorn { spec, alpha } => {
                let svd = SortedSvd::new(&spec.symbol(xi)?);
                let smax = svd.max_singular_value();
                let smin = svd.min_singular_value();
                let condition = if smin > 0.0 { (smax / smin) * (smax / smin) } else { f64::INFINITY };
                if !(condition <= MAX_GRAM_CONDITION) {
                    return Err(Error::SingularSymbol { xi: xi.to_vec(), condition });
                }
                let pinv = svd.pseudo_inverse(spec.d());
                let phase = i_pow(alpha.order() + 3 * spec.k());
                Ok((phase, pinv * alpha.monomial(xi)))
            }
            Kind::KernelProjection { spec, rank } => Ok((one, kernel_projector(spec, *rank, xi)?)),
            Kind::Composed { restricted, basis, rank } => {
                if restricted.d() == 0 {
                    return Ok((one, DMatrix::zeros(self.rows, self.cols)));
                }
                let pi = kernel_projector(restricted, *rank, xi)?;
                Ok((one, basis * pi * basis.transpose()))
            }
            Kind::Unrestricted { spec, proj_ker, rank } => {
                Ok((one, kernel_projector(spec, *rank, xi)? * proj_ker))
            }
            Kind::PseudoInverse { spec, rank } => {
                let svd = checked_svd(spec, *rank, xi)?;
                Ok((one, svd.pseudo_inverse(*rank)))
            }
        }
    }

    /// The complex matrix `m(ξ)`.
    pub fn evaluate(&self, xi: &[f64]) -> Result<DMatrix<Complex64>> {
        let (c, r) = self.evaluate_factored(xi)?;
        Ok(r.map(|x| c * x))
    }
}

fn i_pow(e: u32) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn checked_svd(spec: &OperatorSpec, rank: usize, xi: &[f64]) -> Result<SortedSvd<f64>> {
    let svd = SortedSvd::new(&spec.symbol(xi)?);
    let found = svd.rank_with_floor(RANK_TOL, spec.zero_floor(xi));
    if found != rank {
        return Err(Error::RankViolation {
            xi: xi.to_vec(),
            expected: rank,
            found,
        });
    }
    Ok(svd)
}

fn kernel_projector(spec: &OperatorSpec, rank: usize, xi: &[f64]) -> Result<DMatrix<f64>> {
    let svd = checked_svd(spec, rank, xi)?;
    let k = svd.trailing_right(rank);
    Ok(&k * k.transpose())
}

fn check_rank(spec: &OperatorSpec, rank: usize) -> Result<()> {
    if rank > spec.d().min(spec.l()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "rank {rank} exceeds min(d, l) = {} for `{}`",
            spec.d().min(spec.l()),
            spec.name()
        )));
    }
    Ok(())
}

/// `m(ξ) = (iξ)^α (B(iξ)*B(iξ))^{-1} B(iξ)*`, where `B(iξ) = i^k B[ξ]` is the
/// multiplier of the operator itself. Hence `m(ξ) B(iξ) = (iξ)^α Id` and
/// `T_m(BP) = ∂^α P`.
///
/// The caller is responsible for ellipticity; evaluation fails with
/// [`Error::SingularSymbol`] wherever the Gram matrix is too ill-conditioned.
pub fn mihlin_korn_multiplier(spec: &OperatorSpec, alpha: &MultiIndex) -> Result<MultiplierDescriptor> {
    if alpha.dim() != spec.n() {
        return Err(Error::DimensionMismatch {
            what: "multi-index length",
            expected: spec.n(),
            got: alpha.dim(),
        });
    }
    if alpha.order() > spec.k() {
        return Err(Error::InvalidArgument(alloc::format!(
            "|alpha| = {} exceeds the operator order {}",
            alpha.order(),
            spec.k()
        )));
    }
    if spec.is_vacuous() {
        return Err(Error::InvalidOperator("reconstruction needs d >= 1".into()));
    }
    Ok(MultiplierDescriptor {
        kind: Kind::MihlinKorn { spec: spec.clone(), alpha: alpha.clone() },
        n: spec.n(),
        rows: spec.d(),
        cols: spec.l(),
        homogeneity_degree: alpha.order() as i32 - spec.k() as i32,
        zero_mode_policy: ZeroModePolicy::Annihilate,
        provenance: Provenance::MihlinKorn {
            operator: spec.name().to_string(),
            alpha: alpha.exponents().to_vec(),
        },
    })
}

/// Orthogonal projector onto `ker B[ξ]` for an operator of constant rank
/// `rank`. The rank is taken as given and checked at every evaluation.
pub fn kernel_projection_symbol(spec: &OperatorSpec, rank: usize) -> Result<MultiplierDescriptor> {
    check_rank(spec, rank)?;
    Ok(MultiplierDescriptor {
        kind: Kind::KernelProjection { spec: spec.clone(), rank },
        n: spec.n(),
        rows: spec.d(),
        cols: spec.d(),
        homogeneity_degree: 0,
        zero_mode_policy: ZeroModePolicy::Annihilate,
        provenance: Provenance::KernelProjection {
            operator: spec.name().to_string(),
            rank,
        },
    })
}

/// Symbol of `P ↦ Π 𝒫_ker(𝒜) P`, where `Π(ξ)` is the orthogonal projector
/// onto `ker B[ξ] ∩ ker(𝒜)`; `rank` is the constant rank of `B` on `ker(𝒜)`.
///
/// It vanishes identically when `B` is elliptic on `ker(𝒜)` and reduces to
/// [`kernel_projection_symbol`] for `𝒜 = 0`.
pub fn composed_correction_symbol(spec: &OperatorSpec, part: &PartMap, rank: usize) -> Result<MultiplierDescriptor> {
    let restricted = restrict_symbol(spec, part)?;
    check_rank(&restricted, rank)?;
    Ok(MultiplierDescriptor {
        kind: Kind::Composed {
            restricted,
            basis: part.kernel_basis().clone(),
            rank,
        },
        n: spec.n(),
        rows: spec.d(),
        cols: spec.d(),
        homogeneity_degree: 0,
        zero_mode_policy: ZeroModePolicy::Annihilate,
        provenance: Provenance::ComposedCorrection {
            operator: spec.name().to_string(),
            part: part.name().to_string(),
            rank,
        },
    })
}

/// Symbol of `P ↦ Π_B 𝒫_ker(𝒜) P` with `Π_B(ξ)` the projector onto the full
/// `ker B[ξ]`. Needs `B` itself to have constant rank `rank`. For
/// `B = Curl`, `𝒜 = tr` this is the multiplier whose real-space kernel is the
/// Riesz-type formula `∇Γ * Div dev P`.
pub fn unrestricted_correction_symbol(spec: &OperatorSpec, part: &PartMap, rank: usize) -> Result<MultiplierDescriptor> {
    check_rank(spec, rank)?;
    if part.d() != spec.d() {
        return Err(Error::DimensionMismatch {
            what: "part map source dimension",
            expected: spec.d(),
            got: part.d(),
        });
    }
    Ok(MultiplierDescriptor {
        kind: Kind::Unrestricted {
            spec: spec.clone(),
            proj_ker: part.proj_ker().clone(),
            rank,
        },
        n: spec.n(),
        rows: spec.d(),
        cols: spec.d(),
        homogeneity_degree: 0,
        zero_mode_policy: ZeroModePolicy::Annihilate,
        provenance: Provenance::UnrestrictedCorrection {
            operator: spec.name().to_string(),
            part: part.name().to_string(),
            rank,
        },
    })
}

/// Moore–Penrose pseudoinverse `B[ξ]^†` for an operator of constant rank.
pub fn pseudoinverse_symbol(spec: &OperatorSpec, rank: usize) -> Result<MultiplierDescriptor> {
    check_rank(spec, rank)?;
    Ok(MultiplierDescriptor {
        kind: Kind::PseudoInverse { spec: spec.clone(), rank },
        n: spec.n(),
        rows: spec.d(),
        cols: spec.l(),
        homogeneity_degree: -(spec.k() as i32),
        zero_mode_policy: ZeroModePolicy::Annihilate,
        provenance: Provenance::PseudoInverse {
            operator: spec.name().to_string(),
            rank,
        },
    })
}
