use kms_core::{OperatorSpec, PartMap};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConfigEcho, InequalityConfig, InequalityId};
use super::sides::{ratio_serde, PreparedInequality, Sides};
use crate::error::{LabError, Result};
use crate::torus::{bump_field, random_bandlimited, TorusGrid};

/// Which test fields an estimate runs over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldFamily {
    /// Exhaustive sweep over one representative of every non-Nyquist `±ξ`
    /// pair, with the worst amplitude per frequency.
    pub single_frequency_sweep: bool,
    pub random_trials: usize,
    /// Band limit of random fields as a fraction of `M`.
    pub cutoff_fraction: f64,
    pub bump_trials: usize,
    pub bump_width: f64,
}

impl Default for FieldFamily {
    fn default() -> Self {
        FieldFamily {
            single_frequency_sweep: true,
            random_trials: 50,
            cutoff_fraction: 0.25,
            bump_trials: 0,
            bump_width: 0.8,
        }
    }
}

impl FieldFamily {
    pub fn cutoff_for(&self, m: usize) -> usize {
        ((m as f64 * self.cutoff_fraction).floor() as usize).clamp(1, m / 2 - 1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.cutoff_fraction > 0.0 && self.cutoff_fraction < 0.5) {
            return Err(LabError::InvalidArgument(format!(
                "cutoff_fraction must lie in (0, 0.5), got {}",
                self.cutoff_fraction
            )));
        }
        if self.bump_trials > 0 && !(self.bump_width > 0.0 && self.bump_width < std::f64::consts::PI) {
            return Err(LabError::InvalidArgument(format!(
                "bump_width must lie in (0, π), got {}",
                self.bump_width
            )));
        }
        if !self.single_frequency_sweep && self.random_trials + self.bump_trials == 0 {
            return Err(LabError::InvalidArgument("the field family is empty (trials must be ≥ 1)".into()));
        }
        Ok(())
    }
}

/// How a test field was generated; enough to regenerate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "generator")]
pub enum FieldDescriptor {
    RandomBandlimited { cutoff: usize, seed: u64 },
    PlaneWave { xi: Vec<i64>, v: Vec<f64> },
    Bump { center: Vec<f64>, width: f64, v: Vec<f64> },
}

impl FieldDescriptor {
    pub fn generator(&self) -> &'static str {
        match self {
            FieldDescriptor::RandomBandlimited { .. } => "random_bandlimited",
            FieldDescriptor::PlaneWave { .. } => "plane_wave",
            FieldDescriptor::Bump { .. } => "bump",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub field: FieldDescriptor,
    #[serde(flatten)]
    pub sides: Sides,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSummary {
    pub generator: String,
    pub count: usize,
    #[serde(with = "ratio_serde")]
    pub max_ratio: f64,
}

/// Aggregate of one [`estimate_constant`] run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub config: ConfigEcho,
    pub seed: u64,
    pub family: FieldFamily,
    pub cutoff: usize,
    pub trial_count: usize,
    pub swept_frequencies: usize,
    #[serde(with = "ratio_serde")]
    pub max_ratio: f64,
    /// Lower median over all trials.
    #[serde(with = "ratio_serde")]
    pub median_ratio: f64,
    pub infinite_count: usize,
    pub argmax: TrialResult,
    pub by_generator: Vec<GeneratorSummary>,
    /// Random and bump trials in generation order.
    pub trials: Vec<TrialResult>,
    /// The five worst single-frequency trials.
    pub sweep_worst: Vec<TrialResult>,
    pub within_hypotheses: bool,
}

/// Runs the inequality over a field family and aggregates the ratios.
/// Deterministic in `seed`; trials run in parallel and are merged in
/// generation order.
pub fn estimate_constant(prepared: &PreparedInequality, family: &FieldFamily, seed: u64) -> Result<ConstantEstimate> {
    family.validate()?;
    let cfg = prepared.config();
    let grid = cfg.grid;
    let d = cfg.operator.d();
    let cutoff = family.cutoff_for(grid.points_per_axis());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planned: Vec<FieldDescriptor> = (0..family.random_trials)
        .map(|_| FieldDescriptor::RandomBandlimited {
            cutoff,
            seed: rng.next_u64(),
        })
        .collect();
    for _ in 0..family.bump_trials {
        let center: Vec<f64> = (0..grid.n())
            .map(|_| rng.random_range(0.0..2.0 * std::f64::consts::PI))
            .collect();
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        planned.push(FieldDescriptor::Bump {
            center,
            width: family.bump_width,
            v,
        });
    }

    let sweep: Vec<TrialResult> = if family.single_frequency_sweep {
        let freqs = grid.half_space_frequencies();
        let evaluated: Vec<Result<TrialResult>> = freqs
            .par_iter()
            .map(|xi| {
                let (v, sides) = prepared.worst_single_frequency(xi)?;
                Ok(TrialResult {
                    field: FieldDescriptor::PlaneWave { xi: xi.clone(), v },
                    sides,
                })
            })
            .collect();
        evaluated.into_iter().collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let trials: Vec<TrialResult> = planned
        .par_iter()
        .map(|desc| {
            let field = match desc {
                FieldDescriptor::RandomBandlimited { cutoff, seed } => random_bandlimited(grid, d, *cutoff, *seed)?,
                FieldDescriptor::Bump { center, width, v } => bump_field(grid, center, *width, v)?,
                FieldDescriptor::PlaneWave { .. } => unreachable!("plane waves come from the sweep"),
            };
            Ok(TrialResult {
                field: desc.clone(),
                sides: prepared.kms_sides(&field)?,
            })
        })
        .collect::<Vec<Result<TrialResult>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let all: Vec<&TrialResult> = sweep.iter().chain(&trials).collect();
    let mut argmax = all[0];
    for t in &all[1..] {
        if t.sides.ratio > argmax.sides.ratio {
            argmax = t;
        }
    }
    let mut ratios: Vec<f64> = all.iter().map(|t| t.sides.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let median_ratio = ratios[(ratios.len() - 1) / 2];
    let infinite_count = ratios.iter().filter(|r| r.is_infinite()).count();

    let mut by_generator = Vec::new();
    for name in ["plane_wave", "random_bandlimited", "bump"] {
        let group: Vec<f64> = all
            .iter()
            .filter(|t| t.field.generator() == name)
            .map(|t| t.sides.ratio)
            .collect();
        if !group.is_empty() {
            by_generator.push(GeneratorSummary {
                generator: name.to_string(),
                count: group.len(),
                max_ratio: group.iter().copied().fold(0.0, f64::max),
            });
        }
    }

    let mut order: Vec<usize> = (0..sweep.len()).collect();
    order.sort_by(|&a, &b| sweep[b].sides.ratio.total_cmp(&sweep[a].sides.ratio).then(a.cmp(&b)));
    let sweep_worst = order.iter().take(5).map(|&i| sweep[i].clone()).collect();

    Ok(ConstantEstimate {
        config: cfg.echo(),
        seed,
        family: family.clone(),
        cutoff,
        trial_count: all.len(),
        swept_frequencies: sweep.len(),
        max_ratio: argmax.sides.ratio,
        median_ratio,
        infinite_count,
        argmax: argmax.clone(),
        by_generator,
        trials,
        sweep_worst,
        within_hypotheses: prepared.within_hypotheses(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementEntry {
    pub points_per_axis: usize,
    pub estimate: ConstantEstimate,
}

/// Estimates across increasing grid sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub sizes: Vec<usize>,
    pub entries: Vec<RefinementEntry>,
    #[serde(with = "ratio_serde")]
    pub first_max_ratio: f64,
    /// `max_i r_i / r_0 − 1` over the per-size maxima `r_i`.
    #[serde(with = "ratio_serde")]
    pub growth: f64,
    pub all_finite: bool,
    pub monotone_nondecreasing: bool,
}

impl RefinementReport {
    pub fn max_ratios(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.estimate.max_ratio).collect()
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(LabError::InvalidArgument("no grid sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::InvalidArgument(format!("grid sizes must increase strictly: {sizes:?}")));
    }
    Ok(())
}

/// Runs [`estimate_constant`] at each size with the cutoff scaled in
/// proportion to `M`.
pub fn refinement_study(
    config: &InequalityConfig,
    sizes: &[usize],
    family: &FieldFamily,
    seed: u64,
) -> Result<RefinementReport> {
    check_sizes(sizes)?;
    let mut entries = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let grid = TorusGrid::new(config.n(), m)?;
        let prepared = PreparedInequality::new(config.with_grid(grid)?)?;
        entries.push(RefinementEntry {
            points_per_axis: m,
            estimate: estimate_constant(&prepared, family, seed)?,
        });
    }
    let maxima: Vec<f64> = entries.iter().map(|e| e.estimate.max_ratio).collect();
    let all_finite = maxima.iter().all(|r| r.is_finite());
    let first = maxima[0];
    let top = maxima.iter().copied().fold(0.0, f64::max);
    let growth = if !all_finite {
        f64::INFINITY
    } else if first == 0.0 {
        if top == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        top / first - 1.0
    };
    Ok(RefinementReport {
        sizes: sizes.to_vec(),
        entries,
        first_max_ratio: first,
        growth,
        all_finite,
        monotone_nondecreasing: maxima.windows(2).all(|w| w[0] <= w[1]),
    })
}

/// Outcome of the `p = 1` probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P1ProbeReport {
    pub operator: String,
    pub partmap: String,
    pub common_rank: Option<usize>,
    pub is_constant_rank: bool,
    pub is_cancelling: bool,
    /// `"within theorem hypotheses"` or `"outside theorem hypotheses"`.
    pub verdict: String,
    pub p: f64,
    pub p_star: f64,
    pub refinement: RefinementReport,
    /// Bounded ratios are an observation, not a proof.
    pub bounded_across_sizes: bool,
}

/// `korn_const_p1` with the correction on, across grid sizes.
pub fn p1_probe(
    part: &PartMap,
    operator: &OperatorSpec,
    sizes: &[usize],
    family: &FieldFamily,
    seed: u64,
) -> Result<P1ProbeReport> {
    check_sizes(sizes)?;
    let grid = TorusGrid::new(operator.n(), sizes[0])?;
    let config = InequalityConfig::new(
        InequalityId::KornConstP1,
        operator.clone(),
        Some(part.clone()),
        1.0,
        grid,
        true,
    )?;
    let prepared = PreparedInequality::new(config.clone())?;
    let cls = prepared.classification().clone();
    let refinement = refinement_study(&config, sizes, family, seed)?;
    Ok(P1ProbeReport {
        operator: operator.name().to_string(),
        partmap: part.name().to_string(),
        common_rank: cls.common_rank,
        is_constant_rank: cls.is_constant_rank,
        is_cancelling: cls.is_cancelling,
        verdict: if prepared.within_hypotheses() {
            "within theorem hypotheses".into()
        } else {
            "outside theorem hypotheses".into()
        },
        p: 1.0,
        p_star: config.p_star(),
        bounded_across_sizes: refinement.all_finite,
        refinement,
    })
}
