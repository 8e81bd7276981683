use kms_core::{catalog_operator, catalog_partmap, sobolev_conjugate, OperatorSpec, PartMap};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::torus::TorusGrid;

/// Which inequality a run tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// `‖D^k u‖_{L^p} ≲ ‖B u‖_{L^p}` for elliptic `B` acting on `u`.
    KornEll,
    /// `𝒜 = sym`, `B = Curl` (row-wise), `n = 3`.
    KmsSym,
    /// General `𝒜` with `B = Curl` (row-wise).
    Asplit,
    /// `B` elliptic on `ker 𝒜`, no correction.
    KornEllip,
    /// `B` of constant rank on `ker 𝒜`, with the correction on the left.
    KornConst,
    /// As `KornConst`, with negative-order `L²` norms.
    KornConst2P2,
    /// As `KornConst` at `p = 1`.
    KornConstP1,
}

pub const INEQUALITY_NAMES: &[&str] = &[
    "korn_ell",
    "kms_sym",
    "asplit",
    "korn_ellip",
    "korn_const",
    "korn_const2_p2",
    "korn_const_p1",
];

impl InequalityId {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "korn_ell" => InequalityId::KornEll,
            "kms_sym" => InequalityId::KmsSym,
            "asplit" => InequalityId::Asplit,
            "korn_ellip" => InequalityId::KornEllip,
            "korn_const" => InequalityId::KornConst,
            "korn_const2_p2" => InequalityId::KornConst2P2,
            "korn_const_p1" => InequalityId::KornConstP1,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::KornEll => "korn_ell",
            InequalityId::KmsSym => "kms_sym",
            InequalityId::Asplit => "asplit",
            InequalityId::KornEllip => "korn_ellip",
            InequalityId::KornConst => "korn_const",
            InequalityId::KornConst2P2 => "korn_const2_p2",
            InequalityId::KornConstP1 => "korn_const_p1",
        }
    }

    /// Inequalities that carry the correction term on the left.
    pub fn has_correction(self) -> bool {
        matches!(
            self,
            InequalityId::KornConst | InequalityId::KornConst2P2 | InequalityId::KornConstP1
        )
    }
}

/// How one side term is measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormKind {
    /// `‖D^order f‖_{L^exponent}`.
    Sobolev { order: u32, exponent: f64 },
    /// `(Σ_{ξ≠0} |ξ|^{2 weight} |f̂|²)^{1/2}`.
    FourierWeight { weight: f64 },
}

/// A fully specified inequality test.
#[derive(Clone, Debug)]
pub struct InequalityConfig {
    pub inequality: InequalityId,
    pub operator: OperatorSpec,
    pub partmap: Option<PartMap>,
    pub p: f64,
    pub grid: TorusGrid,
    pub correction_enabled: bool,
}

/// Serializable summary of an [`InequalityConfig`] for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub inequality: InequalityId,
    pub operator: String,
    pub partmap: Option<String>,
    pub n: usize,
    pub d: usize,
    pub k: u32,
    pub p: f64,
    pub p_star: f64,
    pub points_per_axis: usize,
    pub correction_enabled: bool,
}

fn same_coefficients(a: &OperatorSpec, b: &OperatorSpec) -> bool {
    a.n() == b.n()
        && a.d() == b.d()
        && a.l() == b.l()
        && a.k() == b.k()
        && a.coefficients().count() == b.coefficients().count()
        && a.coefficients().zip(b.coefficients()).all(|((ia, ma), (ib, mb))| ia == ib && ma == mb)
}

fn is_rowwise_curl(spec: &OperatorSpec) -> bool {
    spec.n() == 3
        && catalog_operator("curl_matrix_rowwise", 3)
            .map(|c| same_coefficients(spec, &c))
            .unwrap_or(false)
}

impl InequalityConfig {
    pub fn new(
        inequality: InequalityId,
        operator: OperatorSpec,
        partmap: Option<PartMap>,
        p: f64,
        grid: TorusGrid,
        correction_enabled: bool,
    ) -> Result<Self> {
        let n = operator.n();
        if grid.n() != n {
            return Err(LabError::InvalidArgument(format!(
                "grid dimension {} differs from operator dimension {n}",
                grid.n()
            )));
        }
        if !(p >= 1.0 && p < n as f64) {
            return Err(LabError::InvalidArgument(format!("exponent p = {p} must lie in [1, n) = [1, {n})")));
        }
        match inequality {
            InequalityId::KornConstP1 if p != 1.0 => {
                return Err(LabError::InvalidArgument(format!("korn_const_p1 requires p = 1, got {p}")));
            }
            InequalityId::KornConst2P2 if p != 2.0 => {
                return Err(LabError::InvalidArgument(format!("korn_const2_p2 requires p = 2, got {p}")));
            }
            _ => {}
        }
        match (&partmap, inequality) {
            (Some(_), InequalityId::KornEll) => {
                return Err(LabError::InvalidArgument("korn_ell takes no part map".into()));
            }
            (None, id) if id != InequalityId::KornEll => {
                return Err(LabError::InvalidArgument(format!("{} needs a part map", id.name())));
            }
            (Some(a), _) if a.d() != operator.d() => {
                return Err(LabError::InvalidArgument(format!(
                    "part map `{}` acts on ℝ^{}, operator `{}` on ℝ^{}",
                    a.name(),
                    a.d(),
                    operator.name(),
                    operator.d()
                )));
            }
            _ => {}
        }
        if matches!(inequality, InequalityId::KmsSym | InequalityId::Asplit) && !is_rowwise_curl(&operator) {
            return Err(LabError::InvalidArgument(format!(
                "{} requires the row-wise Curl in n = 3, got `{}`",
                inequality.name(),
                operator.name()
            )));
        }
        if inequality == InequalityId::KmsSym {
            let sym = catalog_partmap("sym", 3)?;
            if partmap.as_ref().map(|a| a.matrix() != sym.matrix()).unwrap_or(true) {
                return Err(LabError::InvalidArgument("kms_sym requires the part map sym".into()));
            }
        }
        if correction_enabled && !inequality.has_correction() {
            return Err(LabError::InvalidArgument(format!(
                "{} has no correction term; only korn_const variants accept correction = true",
                inequality.name()
            )));
        }
        Ok(InequalityConfig {
            inequality,
            operator,
            partmap,
            p,
            grid,
            correction_enabled,
        })
    }

    pub fn with_grid(&self, grid: TorusGrid) -> Result<Self> {
        Self::new(
            self.inequality,
            self.operator.clone(),
            self.partmap.clone(),
            self.p,
            grid,
            self.correction_enabled,
        )
    }

    pub fn with_correction(&self, enabled: bool) -> Result<Self> {
        Self::new(
            self.inequality,
            self.operator.clone(),
            self.partmap.clone(),
            self.p,
            self.grid,
            enabled,
        )
    }

    pub fn n(&self) -> usize {
        self.operator.n()
    }

    pub fn p_star(&self) -> f64 {
        sobolev_conjugate(self.p, self.n()).expect("p validated against n")
    }

    /// Norm on the left-hand side.
    pub fn lhs_norm(&self) -> NormKind {
        let k = self.operator.k();
        match self.inequality {
            InequalityId::KornEll => NormKind::Sobolev {
                order: k,
                exponent: self.p,
            },
            InequalityId::KornConst2P2 => NormKind::FourierWeight { weight: -1.0 },
            _ => NormKind::Sobolev {
                order: k.saturating_sub(1),
                exponent: self.p_star(),
            },
        }
    }

    /// Norm of `𝒜[P]`; `None` when the inequality has no part term.
    pub fn part_norm(&self) -> Option<NormKind> {
        match self.inequality {
            InequalityId::KornEll => None,
            InequalityId::KornConst2P2 => Some(NormKind::FourierWeight { weight: -1.0 }),
            _ => Some(NormKind::Sobolev {
                order: self.operator.k().saturating_sub(1),
                exponent: self.p_star(),
            }),
        }
    }

    /// Norm of `BP`.
    pub fn operator_norm(&self) -> NormKind {
        match self.inequality {
            InequalityId::KornConst2P2 => NormKind::FourierWeight {
                weight: -(self.operator.k() as f64),
            },
            _ => NormKind::Sobolev {
                order: 0,
                exponent: self.p,
            },
        }
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            inequality: self.inequality,
            operator: self.operator.name().to_string(),
            partmap: self.partmap.as_ref().map(|a| a.name().to_string()),
            n: self.n(),
            d: self.operator.d(),
            k: self.operator.k(),
            p: self.p,
            p_star: self.p_star(),
            points_per_axis: self.grid.points_per_axis(),
            correction_enabled: self.correction_enabled,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curl() -> OperatorSpec {
        catalog_operator("curl_matrix_rowwise", 3).unwrap()
    }

    #[test]
    fn exponent_rules() {
        let g = TorusGrid::new(3, 8).unwrap();
        let tr = || Some(catalog_partmap("tr", 3).unwrap());
        assert!(InequalityConfig::new(InequalityId::KornConst, curl(), tr(), 3.0, g, true).is_err());
        assert!(InequalityConfig::new(InequalityId::KornConstP1, curl(), tr(), 2.0, g, true).is_err());
        assert!(InequalityConfig::new(InequalityId::KornConst2P2, curl(), tr(), 1.5, g, true).is_err());
        let c = InequalityConfig::new(InequalityId::KornConstP1, curl(), tr(), 1.0, g, true).unwrap();
        assert!((c.p_star() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn structural_requirements() {
        let g = TorusGrid::new(3, 8).unwrap();
        let sym = Some(catalog_partmap("sym", 3).unwrap());
        let dev = Some(catalog_partmap("dev", 3).unwrap());
        assert!(InequalityConfig::new(InequalityId::KmsSym, curl(), sym.clone(), 2.0, g, false).is_ok());
        assert!(InequalityConfig::new(InequalityId::KmsSym, curl(), dev.clone(), 2.0, g, false).is_err());
        assert!(InequalityConfig::new(InequalityId::Asplit, curl(), dev, 2.0, g, false).is_ok());
        let grad = catalog_operator("sym_gradient", 3).unwrap();
        assert!(InequalityConfig::new(InequalityId::KornEll, grad.clone(), None, 2.0, g, false).is_ok());
        assert!(InequalityConfig::new(InequalityId::KornEll, grad, sym.clone(), 2.0, g, false).is_err());
        assert!(InequalityConfig::new(InequalityId::KmsSym, curl(), sym, 2.0, g, true).is_err());
        assert!(InequalityConfig::new(InequalityId::KornConst, curl(), None, 2.0, g, true).is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in INEQUALITY_NAMES {
            assert_eq!(InequalityId::parse(name).unwrap().name(), *name);
        }
        assert!(InequalityId::parse("korn").is_none());
    }
}
