use kms_core::linalg::{spectral_norm, SortedSvd};
use kms_core::{
    classify, classify_on_kernel, composed_correction_symbol, ClassificationReport, DMatrix, MultiplierDescriptor,
    SphereSampling, RANK_TOL,
};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::config::{InequalityConfig, InequalityId, NormKind};
use crate::error::{LabError, Result};
use crate::torus::{fourier_weight_norm, homog_sobolev_norm, AssembledMultiplier, TensorField};

/// `rhs` at or below this counts as zero when deciding an infinite ratio.
pub const RHS_ZERO: f64 = 1e-14;
/// `lhs` above this is a genuine left-hand side.
pub const LHS_ZERO: f64 = 1e-10;
/// Both sides at or below these levels give ratio 0.
pub const RHS_NEGLIGIBLE: f64 = 1e-12;

/// Seed of the sphere sampling used to check preconditions.
pub const CLASSIFY_SEED: u64 = 0;

/// `lhs / rhs` with the degenerate cases fixed: `∞` when `rhs ≤ 1e-14` and
/// `lhs > 1e-10`; `0` when both are negligible.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs <= RHS_ZERO {
        if lhs > LHS_ZERO {
            f64::INFINITY
        } else {
            0.0
        }
    } else if lhs <= LHS_ZERO && rhs <= RHS_NEGLIGIBLE {
        0.0
    } else {
        lhs / rhs
    }
}

/// Serializes non-finite ratios as the string `"inf"`.
pub mod ratio_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad ratio `{s}`"))),
        }
    }
}

/// Both sides of one inequality evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub part_term: f64,
    pub operator_term: f64,
    pub rhs: f64,
    #[serde(with = "ratio_serde")]
    pub ratio: f64,
}

impl Sides {
    fn new(lhs: f64, part_term: f64, operator_term: f64) -> Self {
        let rhs = part_term + operator_term;
        Sides {
            lhs,
            part_term,
            operator_term,
            rhs,
            ratio: ratio(lhs, rhs),
        }
    }
}

/// An [`InequalityConfig`] whose preconditions have been checked against the
/// classifier, with the operator and correction multipliers assembled on the
/// grid.
///
/// Assembly is eager: it runs on the rayon pool, and a lazy cache filled from
/// inside parallel trials can deadlock when a waiting worker steals a trial
/// that needs the same cache.
#[derive(Debug)]
pub struct PreparedInequality {
    config: InequalityConfig,
    classification: ClassificationReport,
    correction: Option<MultiplierDescriptor>,
    within_hypotheses: bool,
    operator_grid: AssembledMultiplier,
    correction_grid: Option<AssembledMultiplier>,
}

impl PreparedInequality {
    pub fn new(config: InequalityConfig) -> Result<Self> {
        let n = config.n();
        let sampling = SphereSampling::default_real(n, CLASSIFY_SEED)?;
        let op = &config.operator;
        let classification = match &config.partmap {
            None => classify(op, &sampling, RANK_TOL)?,
            Some(a) => classify_on_kernel(op, a, &sampling, RANK_TOL)?,
        };
        let on = match &config.partmap {
            None => String::new(),
            Some(a) => format!(" on ker({})", a.name()),
        };
        let mut within_hypotheses = true;
        match config.inequality {
            InequalityId::KornEll | InequalityId::KmsSym | InequalityId::Asplit | InequalityId::KornEllip => {
                if !classification.is_elliptic {
                    return Err(LabError::Precondition(format!(
                        "{} needs `{}` elliptic{on}; smallest sampled singular value {:.3e} at {:?}",
                        config.inequality.name(),
                        op.name(),
                        classification.min_singular_value,
                        classification.min_singular_frequency
                    )));
                }
            }
            InequalityId::KornConst | InequalityId::KornConst2P2 | InequalityId::KornConstP1 => {
                if !classification.is_constant_rank {
                    return Err(LabError::Precondition(format!(
                        "{} needs `{}` of constant rank{on}; sampled ranks {:?}",
                        config.inequality.name(),
                        op.name(),
                        classification.rank_histogram
                    )));
                }
                if config.inequality == InequalityId::KornConstP1 {
                    within_hypotheses = classification.is_cancelling;
                }
            }
        }
        let correction = if config.correction_enabled {
            let part = config.partmap.as_ref().expect("validated: correction implies a part map");
            let rank = classification.common_rank.expect("constant rank checked above");
            Some(composed_correction_symbol(op, part, rank)?)
        } else {
            None
        };
        let operator_grid = AssembledMultiplier::from_operator(&config.operator, config.grid)?;
        let correction_grid = match &correction {
            Some(desc) if !desc.is_identically_zero() => Some(AssembledMultiplier::from_descriptor(desc, config.grid)?),
            _ => None,
        };
        Ok(PreparedInequality {
            config,
            classification,
            correction,
            within_hypotheses,
            operator_grid,
            correction_grid,
        })
    }

    pub fn config(&self) -> &InequalityConfig {
        &self.config
    }

    pub fn classification(&self) -> &ClassificationReport {
        &self.classification
    }

    pub fn correction(&self) -> Option<&MultiplierDescriptor> {
        self.correction.as_ref()
    }

    /// False when a p = 1 run lacks cancellation on `ker 𝒜`.
    pub fn within_hypotheses(&self) -> bool {
        self.within_hypotheses
    }

    fn operator_on_grid(&self) -> Result<&AssembledMultiplier> {
        Ok(&self.operator_grid)
    }

    /// The correction assembled on the grid, if one is active and not
    /// identically zero.
    pub fn correction_on_grid(&self) -> Result<Option<&AssembledMultiplier>> {
        Ok(self.correction_grid.as_ref())
    }

    /// Evaluates both sides on a grid field.
    pub fn kms_sides(&self, field: &TensorField) -> Result<Sides> {
        let cfg = &self.config;
        if field.grid() != cfg.grid || field.fiber_dim() != cfg.operator.d() {
            return Err(LabError::InvalidArgument(format!(
                "field is {}-vector valued on M = {}, config expects {}-vectors on M = {}",
                field.fiber_dim(),
                field.grid().points_per_axis(),
                cfg.operator.d(),
                cfg.grid.points_per_axis()
            )));
        }
        let tol = 1e-12 * field.max_abs().max(1.0);
        if !field.is_zero_mean(tol) {
            return Err(LabError::InvalidArgument("field must have zero mean".into()));
        }
        let corrected;
        let left = match self.correction_on_grid()? {
            Some(c) => {
                corrected = field.sub(&c.apply(field)?)?;
                &corrected
            }
            None => field,
        };
        let lhs = measure(left, cfg.lhs_norm())?;
        let part_term = match (&cfg.partmap, cfg.part_norm()) {
            (Some(a), Some(kind)) => measure(&field.map_pointwise(a.matrix())?, kind)?,
            _ => 0.0,
        };
        let bp = self.operator_on_grid()?.apply(field)?;
        let operator_term = measure(&bp, cfg.operator_norm())?;
        Ok(Sides::new(lhs, part_term, operator_term))
    }

    fn frequency_factors(&self, xi: &[i64]) -> Result<FrequencyFactors> {
        let grid = self.config.grid;
        let half = (grid.points_per_axis() / 2) as i64;
        if xi.len() != grid.n() || xi.iter().all(|&x| x == 0) || xi.iter().any(|x| x.abs() >= half) {
            return Err(LabError::InvalidArgument(format!(
                "{xi:?} is not a nonzero non-Nyquist frequency of the grid"
            )));
        }
        let m = grid.points_per_axis() as u64;
        let g = xi.iter().fold(m, |acc, &x| gcd(acc, x.unsigned_abs()));
        let periods = (m / g) as usize;
        let n = grid.n();
        let radius = xi.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        let xi_f: Vec<f64> = xi.iter().map(|&x| x as f64).collect();
        let k = self.config.operator.k();
        let quarter = std::f64::consts::FRAC_PI_2;
        let scale = |kind: NormKind, shift: f64| unit_plane_wave_norm(kind, radius, shift, periods, n);
        let correction = match &self.correction {
            Some(c) if !c.is_identically_zero() => Some(c.evaluate_factored(&xi_f)?.1),
            _ => None,
        };
        Ok(FrequencyFactors {
            lhs: scale(self.config.lhs_norm(), 0.0),
            part: self.config.part_norm().map(|kind| scale(kind, 0.0)).unwrap_or(0.0),
            operator: scale(self.config.operator_norm(), k as f64 * quarter),
            symbol: self.config.operator.symbol(&xi_f)?,
            correction,
        })
    }

    /// Both sides for `P = v cos(ξ·x)` computed from `(ξ, v)` alone, using
    /// exact discrete averages of `|cos|^q` over the grid.
    pub fn single_frequency_sides(&self, xi: &[i64], v: &[f64]) -> Result<Sides> {
        if v.len() != self.config.operator.d() {
            return Err(LabError::InvalidArgument(format!(
                "amplitude has {} entries, expected {}",
                v.len(),
                self.config.operator.d()
            )));
        }
        let f = self.frequency_factors(xi)?;
        Ok(self.sides_from_factors(&f, &DVector::from_column_slice(v)))
    }

    fn sides_from_factors(&self, f: &FrequencyFactors, v: &DVector<f64>) -> Sides {
        let left = match &f.correction {
            Some(c) => v - c * v,
            None => v.clone(),
        };
        let part = match &self.config.partmap {
            Some(a) => f.part * (a.matrix() * v).norm(),
            None => 0.0,
        };
        Sides::new(f.lhs * left.norm(), part, f.operator * (&f.symbol * v).norm())
    }

    /// The unit amplitude `v` maximizing the ratio at frequency `ξ` among
    /// SVD candidates, with its sides.
    ///
    /// If `ker 𝒜 ∩ ker B[ξ]` carries a direction the left side sees, that
    /// direction is returned (ratio ∞). Otherwise candidates come from the
    /// singular vectors of `L S_θ^+`, where `L` is the left-side matrix and
    /// `S_θ` stacks the weighted part map and symbol, for several weights θ.
    pub fn worst_single_frequency(&self, xi: &[i64]) -> Result<(Vec<f64>, Sides)> {
        let f = self.frequency_factors(xi)?;
        let d = self.config.operator.d();
        let ident = DMatrix::<f64>::identity(d, d);
        let left = match &f.correction {
            Some(c) => (&ident - c) * f.lhs,
            None => ident * f.lhs,
        };
        let weights: Vec<(f64, f64)> = match &self.config.partmap {
            None => vec![(0.0, 1.0)],
            Some(_) => (0..8)
                .map(|j| {
                    let t = (j as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / 8.0;
                    (t.cos(), t.sin())
                })
                .collect(),
        };
        let mut candidates: Vec<DVector<f64>> = Vec::new();
        for (idx, &(wa, wb)) in weights.iter().enumerate() {
            let stacked = self.stacked(&f, wa, wb);
            let svd = SortedSvd::new(&stacked);
            let smax = svd.max_singular_value();
            let rank = if smax > 0.0 { svd.rank(1e-10) } else { 0 };
            if idx == 0 {
                if rank < d {
                    let z = svd.trailing_right(rank);
                    let lz = &left * &z;
                    if spectral_norm(&lz) > 1e-8 * f.lhs.max(f64::MIN_POSITIVE) {
                        let y = SortedSvd::new(&lz).v.column(0).into_owned();
                        candidates.push(&z * y);
                    }
                }
                for c in 0..d {
                    candidates.push(svd.v.column(c).into_owned());
                }
            }
            if rank == 0 {
                continue;
            }
            let pinv = svd.pseudo_inverse(rank);
            let m = &left * &pinv;
            let msvd = SortedSvd::new(&m);
            let top = msvd.max_singular_value();
            for (c, &s) in msvd.singular_values.iter().enumerate() {
                if s > 1e-12 * top {
                    candidates.push(&pinv * msvd.v.column(c));
                }
            }
        }
        let mut best: Option<(DVector<f64>, Sides)> = None;
        for cand in candidates {
            let norm = cand.norm();
            if !(norm > 0.0) {
                continue;
            }
            let v = cand / norm;
            let sides = self.sides_from_factors(&f, &v);
            let better = match &best {
                None => true,
                Some((_, b)) => sides.ratio > b.ratio,
            };
            if better {
                best = Some((v, sides));
            }
        }
        let (v, sides) = best.expect("at least d candidates");
        Ok((v.iter().copied().collect(), sides))
    }

    fn stacked(&self, f: &FrequencyFactors, wa: f64, wb: f64) -> DMatrix<f64> {
        let d = self.config.operator.d();
        let b = &f.symbol * (wb * f.operator);
        match &self.config.partmap {
            None => b,
            Some(a) => {
                let am = a.matrix() * (wa * f.part);
                let mut s = DMatrix::zeros(am.nrows() + b.nrows(), d);
                s.view_mut((0, 0), (am.nrows(), d)).copy_from(&am);
                s.view_mut((am.nrows(), 0), (b.nrows(), d)).copy_from(&b);
                s
            }
        }
    }
}

struct FrequencyFactors {
    lhs: f64,
    part: f64,
    operator: f64,
    symbol: DMatrix<f64>,
    correction: Option<DMatrix<f64>>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `‖cos(θ + shift)‖_{L^q}` on `[0, 2π)^n` when `θ = ξ·x` takes `periods`
/// equally spaced values on the grid.
fn discrete_cos_norm(q: f64, shift: f64, periods: usize, n: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mean = (0..periods)
        .map(|s| (two_pi * s as f64 / periods as f64 + shift).cos().abs().powf(q))
        .sum::<f64>()
        / periods as f64;
    mean.powf(1.0 / q) * two_pi.powf(n as f64 / q)
}

/// Norm of `w cos(ξ·x + shift)` for unit `|w|`.
fn unit_plane_wave_norm(kind: NormKind, radius: f64, shift: f64, periods: usize, n: usize) -> f64 {
    match kind {
        NormKind::Sobolev { order, exponent } => {
            radius.powi(order as i32)
                * discrete_cos_norm(exponent, shift + order as f64 * std::f64::consts::FRAC_PI_2, periods, n)
        }
        NormKind::FourierWeight { weight } => radius.powf(weight) * discrete_cos_norm(2.0, shift, periods, n),
    }
}

/// Evaluates one side term on a grid field.
pub fn measure(field: &TensorField, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Sobolev { order, exponent } => homog_sobolev_norm(field, order, exponent),
        NormKind::FourierWeight { weight } => Ok(fourier_weight_norm(field, weight)),
    }
}
