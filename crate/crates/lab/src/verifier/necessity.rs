use kms_core::linalg::SortedSvd;
use kms_core::{restrict_symbol, OperatorSpec, PartMap, RANK_TOL};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::config::{InequalityConfig, InequalityId};
use super::estimate::{FieldDescriptor, TrialResult};
use super::sides::{measure, PreparedInequality};
use crate::error::Result;
use crate::torus::{plane_wave_field, TorusGrid};

/// A frequency and a unit amplitude in `ker 𝒜 ∩ ker B[ξ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub xi: Vec<i64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum NecessityOutcome {
    /// The witness plane wave breaks the uncorrected inequality.
    Demonstrated {
        witness: Witness,
        /// Left-side norm of the witness field itself.
        field_scale: f64,
        uncorrected: TrialResult,
        corrected: TrialResult,
    },
    /// `B` has no kernel on `ker 𝒜` at any grid frequency.
    CorrectionUnnecessary { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub operator: String,
    pub partmap: String,
    pub points_per_axis: usize,
    pub p: f64,
    pub outcome: NecessityOutcome,
}

/// First frequency (by `|ξ|`, then grid order) where the restricted symbol
/// has a kernel, with a kernel amplitude lifted back to `ℝ^d`. Entries below
/// `1e-13` of the largest are snapped to zero before renormalizing, so the
/// amplitude is exactly annihilated where the algebra says it should be.
pub fn find_witness(part: &PartMap, operator: &OperatorSpec, grid: TorusGrid) -> Result<Option<Witness>> {
    let restricted = restrict_symbol(operator, part)?;
    if restricted.d() == 0 {
        return Ok(None);
    }
    let mut freqs = grid.half_space_frequencies();
    freqs.sort_by_key(|xi| xi.iter().map(|x| x * x).sum::<i64>());
    for xi in freqs {
        let xf: Vec<f64> = xi.iter().map(|&x| x as f64).collect();
        let svd = SortedSvd::new(&restricted.symbol(&xf)?);
        let rank = svd.rank_with_floor(RANK_TOL, restricted.zero_floor(&xf));
        if rank == restricted.d() {
            continue;
        }
        let z = svd.v.column(rank).into_owned();
        let lifted: DVector<f64> = part.kernel_basis() * z;
        let top = lifted.amax();
        let mut v: Vec<f64> = lifted.iter().map(|&x| if x.abs() <= 1e-13 * top { 0.0 } else { x }).collect();
        if let Some(&first) = v.iter().find(|x| **x != 0.0) {
            let s = first.signum() / v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x *= s);
        }
        return Ok(Some(Witness { xi, v }));
    }
    Ok(None)
}

/// Pairs an uncorrected and a corrected `korn_const` run on a plane wave in
/// `ker 𝒜 ∩ ker B[ξ₀]`.
pub fn necessity_demo(part: &PartMap, operator: &OperatorSpec, grid: TorusGrid, p: f64) -> Result<NecessityReport> {
    let uncorrected_cfg = InequalityConfig::new(
        InequalityId::KornConst,
        operator.clone(),
        Some(part.clone()),
        p,
        grid,
        false,
    )?;
    let uncorrected_prep = PreparedInequality::new(uncorrected_cfg.clone())?;
    let report = |outcome| NecessityReport {
        operator: operator.name().to_string(),
        partmap: part.name().to_string(),
        points_per_axis: grid.points_per_axis(),
        p,
        outcome,
    };
    let Some(witness) = find_witness(part, operator, grid)? else {
        let message = if uncorrected_prep.classification().vacuous {
            format!("ker({}) is trivial: the correction is vacuous", part.name())
        } else {
            format!(
                "correction unnecessary on this grid: `{}` is injective on ker({}) at every grid frequency",
                operator.name(),
                part.name()
            )
        };
        return Ok(report(NecessityOutcome::CorrectionUnnecessary { message }));
    };
    let field = plane_wave_field(grid, &witness.xi, &witness.v, None)?;
    let field_scale = measure(&field, uncorrected_cfg.lhs_norm())?;
    let corrected_prep = PreparedInequality::new(uncorrected_cfg.with_correction(true)?)?;
    let descriptor = FieldDescriptor::PlaneWave {
        xi: witness.xi.clone(),
        v: witness.v.clone(),
    };
    let uncorrected = TrialResult {
        field: descriptor.clone(),
        sides: uncorrected_prep.kms_sides(&field)?,
    };
    let corrected = TrialResult {
        field: descriptor,
        sides: corrected_prep.kms_sides(&field)?,
    };
    Ok(report(NecessityOutcome::Demonstrated {
        witness,
        field_scale,
        uncorrected,
        corrected,
    }))
}
