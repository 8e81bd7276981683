//! Sampled symbol classification.
//!
//! All verdicts are taken over a finite [`SphereSampling`]; they can refute a
//! property exactly (up to the stated tolerance) but only support it
//! heuristically. Samples are processed in their stored order, so identical
//! inputs give bit-identical reports.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{intersect_subspaces, SortedSvd};
use crate::operator::{restrict_symbol, OperatorSpec, NUMERICAL_ZERO};
use crate::partmap::PartMap;
use crate::sampling::{SamplingMode, SphereSampling};
use crate::{Error, Result, INTERSECTION_TOL};

/// Outcome of [`classify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub operator: String,
    pub n: usize,
    pub d: usize,
    pub l: usize,
    pub k: u32,
    /// Smallest `σ_min(B[ξ])` over the samples.
    pub min_singular_value: f64,
    /// Largest `σ_max(B[ξ])` over the samples.
    pub max_singular_value: f64,
    /// Sample at which `min_singular_value` was attained.
    pub min_singular_frequency: Vec<f64>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub is_elliptic: bool,
    pub is_constant_rank: bool,
    pub common_rank: Option<usize>,
    pub is_cancelling: bool,
    /// `dim ⋂_i Im B[ξ_i]` over the samples.
    pub residual_image_dim: usize,
    /// Filled in by [`ClassificationReport::with_c_ellipticity`].
    pub c_ellipticity: Option<CEllipticity>,
    pub vacuous: bool,
    pub tol: f64,
    pub intersection_tol: f64,
    pub sample_count: usize,
    pub sample_seed: u64,
    pub sample_mode: SamplingMode,
    pub curl_convention: String,
}

impl ClassificationReport {
    pub fn with_c_ellipticity(mut self, verdict: CEllipticity) -> Self {
        self.c_ellipticity = Some(verdict);
        self
    }
}

/// Sampled ℂ-ellipticity verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CEllipticity {
    pub is_c_elliptic: bool,
    /// Always true: the verdict comes from sampling plus local search, not
    /// from an algebraic certificate.
    pub sampled: bool,
    /// Frequency with the smallest `σ_min / σ_max`, as `(re, im)` pairs.
    pub witness: Vec<(f64, f64)>,
    pub witness_min_singular_value: f64,
    pub witness_ratio: f64,
    pub tol: f64,
    pub sample_count: usize,
    pub sample_seed: u64,
}

fn check_sampling(spec: &OperatorSpec, sampling: &SphereSampling, tol: f64) -> Result<()> {
    if sampling.is_empty() {
        return Err(Error::InvalidArgument("sampling is empty".into()));
    }
    if sampling.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            what: "sampling dimension",
            expected: spec.n(),
            got: sampling.n(),
        });
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument("tolerance must lie in (0, 1)".into()));
    }
    Ok(())
}

/// Decides ellipticity, constant rank and cancellation from sampled SVDs.
///
/// * rank at `ξ` counts singular values above `tol × σ_max(ξ)`;
/// * elliptic iff `min σ_min > tol × max σ_max`;
/// * the image intersection is refined sample by sample and stops once it
///   is trivial.
pub fn classify(spec: &OperatorSpec, sampling: &SphereSampling, tol: f64) -> Result<ClassificationReport> {
    check_sampling(spec, sampling, tol)?;
    if sampling.mode() != SamplingMode::Real {
        return Err(Error::InvalidArgument("classify needs a real sampling".into()));
    }
    let mut report = ClassificationReport {
        operator: spec.name().to_string(),
        n: spec.n(),
        d: spec.d(),
        l: spec.l(),
        k: spec.k(),
        min_singular_value: f64::INFINITY,
        max_singular_value: 0.0,
        min_singular_frequency: Vec::new(),
        rank_histogram: BTreeMap::new(),
        is_elliptic: true,
        is_constant_rank: true,
        common_rank: Some(0),
        is_cancelling: true,
        residual_image_dim: 0,
        c_ellipticity: None,
        vacuous: spec.is_vacuous(),
        tol,
        intersection_tol: INTERSECTION_TOL,
        sample_count: sampling.count(),
        sample_seed: sampling.seed(),
        sample_mode: sampling.mode(),
        curl_convention: "row-wise".to_string(),
    };
    if spec.is_vacuous() {
        report.min_singular_value = 0.0;
        report.rank_histogram.insert(0, sampling.count());
        return Ok(report);
    }

    let mut intersection = DMatrix::<f64>::identity(spec.l(), spec.l());
    for xi in sampling.real_points() {
        let svd = SortedSvd::new(&spec.symbol(&xi)?);
        let smax = svd.max_singular_value();
        let smin = svd.min_singular_value();
        let rank = svd.rank_with_floor(tol, spec.zero_floor(&xi));
        *report.rank_histogram.entry(rank).or_insert(0) += 1;
        if smin < report.min_singular_value {
            report.min_singular_value = smin;
            report.min_singular_frequency = xi.clone();
        }
        report.max_singular_value = report.max_singular_value.max(smax);
        if intersection.ncols() > 0 {
            let image = svd.leading_left(rank);
            intersection = intersect_subspaces(&intersection, &image, INTERSECTION_TOL);
        }
    }
    report.is_elliptic = report.min_singular_value > tol * report.max_singular_value
        && report.min_singular_value > NUMERICAL_ZERO * spec.scale();
    report.is_constant_rank = report.rank_histogram.len() == 1;
    report.common_rank = if report.is_constant_rank {
        report.rank_histogram.keys().next().copied()
    } else {
        None
    };
    report.residual_image_dim = intersection.ncols();
    report.is_cancelling = report.residual_image_dim == 0;
    Ok(report)
}

/// `classify(restrict_symbol(spec, part), …)`.
pub fn classify_on_kernel(
    spec: &OperatorSpec,
    part: &PartMap,
    sampling: &SphereSampling,
    tol: f64,
) -> Result<ClassificationReport> {
    classify(&restrict_symbol(spec, part)?, sampling, tol)
}

/// Dimension of the running image intersection after each sample. The
/// sequence is non-increasing.
pub fn image_intersection_trace(spec: &OperatorSpec, sampling: &SphereSampling, tol: f64) -> Result<Vec<usize>> {
    check_sampling(spec, sampling, tol)?;
    let mut intersection = DMatrix::<f64>::identity(spec.l(), spec.l());
    let mut trace = Vec::with_capacity(sampling.count());
    for xi in sampling.real_points() {
        if intersection.ncols() > 0 && !spec.is_vacuous() {
            let svd = SortedSvd::new(&spec.symbol(&xi)?);
            let image = svd.leading_left(svd.rank_with_floor(tol, spec.zero_floor(&xi)));
            intersection = intersect_subspaces(&intersection, &image, INTERSECTION_TOL);
        } else if spec.is_vacuous() {
            intersection = DMatrix::zeros(spec.l(), 0);
        }
        trace.push(intersection.ncols());
    }
    Ok(trace)
}

fn c_ratio(spec: &OperatorSpec, xi: &[Complex64]) -> Result<(f64, f64)> {
    let svd = SortedSvd::new(&spec.symbol_complex(xi)?);
    let smax = svd.max_singular_value();
    let smin = svd.min_singular_value();
    let ratio = if smax > spec.zero_floor_complex(xi) { smin / smax } else { 0.0 };
    Ok((ratio, smin))
}

fn normalize(xi: &mut [Complex64]) {
    let nrm = libm::sqrt(xi.iter().map(|z| z.norm_sqr()).sum::<f64>());
    for z in xi.iter_mut() {
        *z /= nrm;
    }
}

/// Sampled ℂ-ellipticity: `σ_min(B[ξ]) > tol × σ_max(B[ξ])` at every complex
/// sample. The best few samples are then polished by a coordinate pattern
/// search on the complex sphere, which can only lower the minimum.
pub fn is_c_elliptic(spec: &OperatorSpec, sampling: &SphereSampling, tol: f64) -> Result<CEllipticity> {
    check_sampling(spec, sampling, tol)?;
    if sampling.mode() != SamplingMode::Complex {
        return Err(Error::InvalidArgument("is_c_elliptic needs a complex sampling".into()));
    }
    let mut verdict = CEllipticity {
        is_c_elliptic: true,
        sampled: true,
        witness: Vec::new(),
        witness_min_singular_value: 0.0,
        witness_ratio: 0.0,
        tol,
        sample_count: sampling.count(),
        sample_seed: sampling.seed(),
    };
    if spec.is_vacuous() {
        return Ok(verdict);
    }
    let mut scored: Vec<(f64, f64, usize)> = Vec::with_capacity(sampling.count());
    for (i, xi) in sampling.complex_points().iter().enumerate() {
        let (ratio, smin) = c_ratio(spec, xi)?;
        scored.push((ratio, smin, i));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal).then(a.2.cmp(&b.2)));

    let (mut best_ratio, mut best_smin, best_idx) = scored[0];
    let mut best: Vec<Complex64> = sampling.complex_points()[best_idx].clone();
    for &(_, _, idx) in scored.iter().take(4) {
        let (xi, ratio, smin) = pattern_search(spec, &sampling.complex_points()[idx])?;
        if ratio < best_ratio {
            best_ratio = ratio;
            best_smin = smin;
            best = xi;
        }
    }
    verdict.is_c_elliptic = best_ratio > tol;
    verdict.witness = best.iter().map(|z| (z.re, z.im)).collect();
    verdict.witness_min_singular_value = best_smin;
    verdict.witness_ratio = best_ratio;
    Ok(verdict)
}

fn pattern_search(spec: &OperatorSpec, start: &[Complex64]) -> Result<(Vec<Complex64>, f64, f64)> {
    let mut x = start.to_vec();
    let (mut f, mut smin) = c_ratio(spec, &x)?;
    let mut step = 0.1;
    let mut evals = 0;
    while step > 1e-13 && evals < 4000 && f > 0.0 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ] {
                let mut trial = x.clone();
                trial[i] += dir * step;
                normalize(&mut trial);
                let (ft, st) = c_ratio(spec, &trial)?;
                evals += 1;
                if ft < f {
                    x = trial;
                    f = ft;
                    smin = st;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((x, f, smin))
}
