//! Fully resolved run requests and their execution.
//!
//! A [`Request`] holds everything a run depends on (operators inline, not
//! by path), so a report's manifest can be replayed without the original
//! input files.

use kms_core::{
    classify, classify_on_kernel, composed_correction_symbol, is_c_elliptic, kernel_projection_symbol,
    mihlin_korn_multiplier, ClassificationReport, MultiIndex, OperatorSpec, PartMap, SamplingMode,
    SphereSampling,
};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::formats::{encode_field, encode_multiplier, fnv1a64, OperatorSource, PartMapSource, RunSpec};
use crate::torus::{bump_field, plane_wave_field, random_bandlimited, AssembledMultiplier, Envelope, TensorField, TorusGrid};
use crate::verifier::{
    curl_riesz_crosscheck, default_evaluation_points, estimate_constant, necessity_demo, p1_probe, refinement_study,
    ConstantEstimate, CrosscheckMode, FieldFamily, InequalityConfig, NecessityReport, P1ProbeReport,
    PreparedInequality, RefinementReport, RieszCrosscheck,
};

/// Which grid multiplier a dump request assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    /// `B(iξ) = i^k B[ξ]`.
    Operator,
    /// Orthogonal projector onto `ker B[ξ]`.
    Projection,
    /// Correction symbol `Π(ξ)` restricted to `ker 𝒜`.
    Correction,
    /// Reconstruction multiplier for `∂^α`.
    Reconstruction,
}

/// Field generator parameters for `field gen`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "generator")]
pub enum FieldSpec {
    RandomBandlimited {
        d: usize,
        cutoff: usize,
        seed: u64,
    },
    PlaneWave {
        xi: Vec<i64>,
        v: Vec<f64>,
        envelope: Option<Envelope>,
    },
    Bump {
        center: Vec<f64>,
        width: f64,
        v: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command")]
pub enum Request {
    Classify {
        operator: OperatorSource,
        on_kernel_of: Option<PartMapSource>,
        samples: usize,
        seed: u64,
        tol: f64,
        complex: bool,
    },
    Verify {
        run: RunSpec,
        seed: u64,
    },
    DemoNecessity {
        operator: OperatorSource,
        partmap: PartMapSource,
        grid: usize,
        p: f64,
    },
    CrosscheckCurlRiesz {
        mode: CrosscheckMode,
        grid: usize,
        center: Vec<f64>,
        width: f64,
        radius: f64,
        amplitude: Vec<f64>,
    },
    ProbeP1 {
        operator: OperatorSource,
        partmap: PartMapSource,
        sizes: Vec<usize>,
        family: FieldFamily,
        seed: u64,
    },
    FieldGen {
        n: usize,
        grid: usize,
        field: FieldSpec,
    },
    MultiplierDump {
        operator: OperatorSource,
        kind: MultiplierKind,
        partmap: Option<PartMapSource>,
        alpha: Option<Vec<u32>>,
        grid: usize,
    },
}

impl Request {
    pub fn command(&self) -> &'static str {
        match self {
            Request::Classify { .. } => "classify",
            Request::Verify { .. } => "verify",
            Request::DemoNecessity { .. } => "demo necessity",
            Request::CrosscheckCurlRiesz { .. } => "crosscheck curl-riesz",
            Request::ProbeP1 { .. } => "probe p1",
            Request::FieldGen { .. } => "field gen",
            Request::MultiplierDump { .. } => "multiplier dump",
        }
    }

    /// The root seed, for commands that draw random numbers.
    pub fn root_seed(&self) -> Option<u64> {
        match self {
            Request::Classify { seed, .. } | Request::Verify { seed, .. } | Request::ProbeP1 { seed, .. } => Some(*seed),
            Request::FieldGen {
                field: FieldSpec::RandomBandlimited { seed, .. },
                ..
            } => Some(*seed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub on_kernel_of: Option<String>,
    /// `dim ker 𝒜` when restricted.
    pub kernel_dim: Option<usize>,
    pub report: ClassificationReport,
}

/// Summary of a binary dump; the bytes themselves go to a file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpSummary {
    pub format: String,
    pub n: usize,
    pub points_per_axis: usize,
    pub shape: Vec<usize>,
    pub byte_len: usize,
    /// FNV-1a 64 of the dump, hex.
    pub fnv1a64: String,
    /// Largest entry magnitude (fields) or Frobenius norm (multipliers).
    pub max_magnitude: f64,
}

/// Short verdict echo recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictEcho {
    pub operator: String,
    pub restricted_to_kernel_of: Option<String>,
    pub is_elliptic: bool,
    pub is_constant_rank: bool,
    pub common_rank: Option<usize>,
    pub is_cancelling: bool,
}

impl VerdictEcho {
    fn from_report(r: &ClassificationReport, part: Option<&str>) -> Self {
        VerdictEcho {
            operator: r.operator.clone(),
            restricted_to_kernel_of: part.map(str::to_string),
            is_elliptic: r.is_elliptic,
            is_constant_rank: r.is_constant_rank,
            common_rank: r.common_rank,
            is_cancelling: r.is_cancelling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RunResult {
    Classification(ClassifyResult),
    Estimate(ConstantEstimate),
    Refinement(RefinementReport),
    Necessity(NecessityReport),
    Crosscheck(RieszCrosscheck),
    P1Probe(P1ProbeReport),
    Dump(DumpSummary),
}

/// What a run produced: the report result, verdicts for the manifest and
/// an optional binary artifact.
pub struct Outcome {
    pub result: RunResult,
    pub verdicts: Vec<VerdictEcho>,
    pub artifact: Option<Vec<u8>>,
}

/// Verdicts for `op` restricted to `ker A`, from the default sphere sampling.
fn restricted_verdict(op: &OperatorSpec, part: &PartMap) -> Result<VerdictEcho> {
    let s = SphereSampling::default_real(op.n(), 0)?;
    let report = classify_on_kernel(op, part, &s, kms_core::RANK_TOL)?;
    Ok(VerdictEcho::from_report(&report, Some(part.name())))
}

fn grid(n: usize, m: usize) -> Result<TorusGrid> {
    TorusGrid::new(n, m)
}

fn sampling(n: usize, samples: usize, seed: u64, mode: SamplingMode) -> Result<SphereSampling> {
    Ok(SphereSampling::quasi_uniform(n, samples, seed, mode)?)
}

pub fn execute(request: &Request) -> Result<Outcome> {
    match request {
        Request::Classify {
            operator,
            on_kernel_of,
            samples,
            seed,
            tol,
            complex,
        } => {
            let op = operator.build()?;
            let part = on_kernel_of.as_ref().map(|a| a.build(op.n(), op.d())).transpose()?;
            let real = sampling(op.n(), *samples, *seed, SamplingMode::Real)?;
            let mut report = match &part {
                None => classify(&op, &real, *tol)?,
                Some(a) => classify_on_kernel(&op, a, &real, *tol)?,
            };
            if *complex {
                let cs = sampling(op.n(), *samples, *seed, SamplingMode::Complex)?;
                let target = match &part {
                    None => op.clone(),
                    Some(a) => kms_core::restrict_symbol(&op, a)?,
                };
                report = report.with_c_ellipticity(is_c_elliptic(&target, &cs, *tol)?);
            }
            let name = part.as_ref().map(|a| a.name().to_string());
            Ok(Outcome {
                verdicts: vec![VerdictEcho::from_report(&report, name.as_deref())],
                result: RunResult::Classification(ClassifyResult {
                    kernel_dim: part.as_ref().map(|a| a.kernel_dim()),
                    on_kernel_of: name,
                    report,
                }),
                artifact: None,
            })
        }
        Request::Verify { run, seed } => {
            let op = run.operator.build()?;
            let part = run.partmap.as_ref().map(|a| a.build(op.n(), op.d())).transpose()?;
            let g = grid(op.n(), run.grid)?;
            let config = InequalityConfig::new(run.inequality, op, part, run.p, g, run.correction)?;
            let prepared = PreparedInequality::new(config.clone())?;
            let verdicts = vec![VerdictEcho::from_report(
                prepared.classification(),
                config.partmap.as_ref().map(|a| a.name()),
            )];
            let result = match &run.sizes {
                Some(sizes) => RunResult::Refinement(refinement_study(&config, sizes, &run.family, *seed)?),
                None => RunResult::Estimate(estimate_constant(&prepared, &run.family, *seed)?),
            };
            Ok(Outcome {
                result,
                verdicts,
                artifact: None,
            })
        }
        Request::DemoNecessity {
            operator,
            partmap,
            grid: m,
            p,
        } => {
            let op = operator.build()?;
            let part = partmap.build(op.n(), op.d())?;
            let report = necessity_demo(&part, &op, grid(op.n(), *m)?, *p)?;
            Ok(Outcome {
                result: RunResult::Necessity(report),
                verdicts: vec![restricted_verdict(&op, &part)?],
                artifact: None,
            })
        }
        Request::CrosscheckCurlRiesz {
            mode,
            grid: m,
            center,
            width,
            radius,
            amplitude,
        } => {
            let op = kms_core::catalog_operator("curl_matrix_rowwise", 3)?;
            let part = kms_core::catalog_partmap("tr", 3)?;
            let g = grid(3, *m)?;
            let field = bump_field(g, center, *width, amplitude)?;
            let points = match mode {
                CrosscheckMode::Symbol => Vec::new(),
                CrosscheckMode::Quadrature => default_evaluation_points(center, *radius),
            };
            Ok(Outcome {
                result: RunResult::Crosscheck(curl_riesz_crosscheck(&part, &op, &field, &points, *mode)?),
                verdicts: vec![restricted_verdict(&op, &part)?],
                artifact: None,
            })
        }
        Request::ProbeP1 {
            operator,
            partmap,
            sizes,
            family,
            seed,
        } => {
            let op = operator.build()?;
            let part = partmap.build(op.n(), op.d())?;
            let report = p1_probe(&part, &op, sizes, family, *seed)?;
            let verdicts = vec![VerdictEcho {
                operator: op.name().to_string(),
                restricted_to_kernel_of: Some(part.name().to_string()),
                is_elliptic: false,
                is_constant_rank: report.is_constant_rank,
                common_rank: report.common_rank,
                is_cancelling: report.is_cancelling,
            }];
            Ok(Outcome {
                result: RunResult::P1Probe(report),
                verdicts,
                artifact: None,
            })
        }
        Request::FieldGen { n, grid: m, field } => {
            let g = grid(*n, *m)?;
            let f = generate_field(g, field)?;
            let bytes = encode_field(&f)?;
            Ok(Outcome {
                result: RunResult::Dump(DumpSummary {
                    format: "KMSF".into(),
                    n: *n,
                    points_per_axis: *m,
                    shape: vec![f.fiber_dim()],
                    byte_len: bytes.len(),
                    fnv1a64: format!("{:016x}", fnv1a64(&bytes)),
                    max_magnitude: f.max_abs(),
                }),
                verdicts: Vec::new(),
                artifact: Some(bytes),
            })
        }
        Request::MultiplierDump {
            operator,
            kind,
            partmap,
            alpha,
            grid: m,
        } => {
            let op = operator.build()?;
            let g = grid(op.n(), *m)?;
            let needs_rank = || -> Result<usize> {
                let s = SphereSampling::default_real(op.n(), 0)?;
                let target = match partmap {
                    Some(a) => kms_core::restrict_symbol(&op, &a.build(op.n(), op.d())?)?,
                    None => op.clone(),
                };
                classify(&target, &s, kms_core::RANK_TOL)?
                    .common_rank
                    .ok_or_else(|| LabError::Precondition(format!("`{}` is not of constant rank", op.name())))
            };
            let assembled = match kind {
                MultiplierKind::Operator => AssembledMultiplier::from_operator(&op, g)?,
                MultiplierKind::Projection => {
                    AssembledMultiplier::from_descriptor(&kernel_projection_symbol(&op, needs_rank()?)?, g)?
                }
                MultiplierKind::Correction => {
                    let a = partmap
                        .as_ref()
                        .ok_or_else(|| LabError::InvalidArgument("the correction needs --A".into()))?
                        .build(op.n(), op.d())?;
                    AssembledMultiplier::from_descriptor(&composed_correction_symbol(&op, &a, needs_rank()?)?, g)?
                }
                MultiplierKind::Reconstruction => {
                    let alpha = alpha
                        .clone()
                        .ok_or_else(|| LabError::InvalidArgument("the reconstruction needs --alpha".into()))?;
                    AssembledMultiplier::from_descriptor(&mihlin_korn_multiplier(&op, &MultiIndex::new(alpha))?, g)?
                }
            };
            let bytes = encode_multiplier(&assembled)?;
            let (rows, cols) = assembled.shape();
            Ok(Outcome {
                result: RunResult::Dump(DumpSummary {
                    format: "KMSM".into(),
                    n: op.n(),
                    points_per_axis: *m,
                    shape: vec![rows, cols],
                    byte_len: bytes.len(),
                    fnv1a64: format!("{:016x}", fnv1a64(&bytes)),
                    max_magnitude: assembled.max_frobenius(),
                }),
                verdicts: Vec::new(),
                artifact: Some(bytes),
            })
        }
    }
}

pub fn generate_field(grid: TorusGrid, spec: &FieldSpec) -> Result<TensorField> {
    match spec {
        FieldSpec::RandomBandlimited { d, cutoff, seed } => random_bandlimited(grid, *d, *cutoff, *seed),
        FieldSpec::PlaneWave { xi, v, envelope } => plane_wave_field(grid, xi, v, envelope.as_ref()),
        FieldSpec::Bump { center, width, v } => bump_field(grid, center, *width, v),
    }
}
