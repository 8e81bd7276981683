//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when
//! output capture is on. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use kms_core::{
    catalog_operator, catalog_partmap, classify, classify_on_kernel, composed_correction_symbol,
    dual_exponent_chain, kernel_projection_symbol, mihlin_korn_multiplier, pseudoinverse_symbol, Complex64, DMatrix,
    MultiIndex, OperatorSpec, SphereSampling, RANK_TOL,
};
use kms_lab::cli::{default_bump_amplitude, run_with};
use kms_lab::torus::{
    apply_multiplier, apply_operator, bump_field, inverse, lp_norm, random_bandlimited, transform, SpectrumField,
    TorusGrid,
};
use kms_lab::verifier::{
    curl_riesz_crosscheck, default_evaluation_points, estimate_constant, necessity_demo, p1_probe, refinement_study,
    CrosscheckMode, FieldFamily, InequalityConfig, InequalityId, NecessityOutcome, PreparedInequality,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// Oracle for criterion 1: symbols assembled from the raw coefficients and
// decomposed by cyclic Jacobi, sharing no numerics with the classifier.

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix.
fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        let total: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn oracle_symbol(op: &OperatorSpec, xi: &[f64]) -> DMatrix<f64> {
    let mut b = DMatrix::<f64>::zeros(op.l(), op.d());
    for (alpha, coeff) in op.coefficients() {
        let mono: f64 = alpha.exponents().iter().zip(xi).map(|(&e, &x)| x.powi(e as i32)).product();
        b += coeff * mono;
    }
    b
}

struct OracleVerdict {
    ranks: Vec<usize>,
    elliptic: bool,
    constant_rank: bool,
    cancelling: bool,
}

fn oracle_classify(op: &OperatorSpec, points: &[Vec<f64>]) -> OracleVerdict {
    let (l, d) = (op.l(), op.d());
    let mut ranks = Vec::new();
    let mut complement_sum = DMatrix::<f64>::zeros(l, l);
    for xi in points {
        let b = oracle_symbol(op, xi);
        // eigenvalues of [[0, B], [Bᵀ, 0]] are ±σ_i plus zeros
        let mut aug = DMatrix::<f64>::zeros(l + d, l + d);
        aug.view_mut((0, l), (l, d)).copy_from(&b);
        aug.view_mut((l, 0), (d, l)).copy_from(&b.transpose());
        let (eig, _) = jacobi_eigen(aug);
        let smax = eig.iter().fold(0.0f64, |m, &x| m.max(x));
        let rank = eig.iter().filter(|&&x| x > (1e-8 * smax).max(1e-12)).count();
        ranks.push(rank);
        // projector onto Im B from the top eigenvectors of B Bᵀ
        let (vals, vecs) = jacobi_eigen(&b * b.transpose());
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
        let mut proj = DMatrix::<f64>::zeros(l, l);
        for &i in order.iter().take(rank) {
            let c = vecs.column(i);
            proj += &c * c.transpose();
        }
        complement_sum += DMatrix::<f64>::identity(l, l) - proj;
    }
    // ⋂ Im B[ξ_i] = ker Σ (I − P_i)
    let (vals, _) = jacobi_eigen(complement_sum);
    let residual = vals.iter().filter(|&&x| x.abs() <= 1e-8 * points.len() as f64).count();
    OracleVerdict {
        elliptic: ranks.iter().all(|&r| r == d),
        constant_rank: ranks.windows(2).all(|w| w[0] == w[1]),
        cancelling: residual == 0,
        ranks,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let names = [
        "gradient",
        "sym_gradient",
        "curl_vector",
        "curl_matrix_rowwise",
        "divergence",
        "sym_curl_matrix",
    ];
    let sampling = SphereSampling::default_real(3, 0).map_err(err)?;
    let points: Vec<Vec<f64>> = sampling.real_points().collect();
    check(points.len() >= 2048, || format!("only {} sample points", points.len()))?;
    let mut summary = Vec::new();
    for name in names {
        let op = catalog_operator(name, 3).map_err(err)?;
        let report = classify(&op, &sampling, RANK_TOL).map_err(err)?;
        let oracle = oracle_classify(&op, &points);
        let oracle_rank = oracle.constant_rank.then(|| oracle.ranks[0]);
        check(
            report.is_elliptic == oracle.elliptic
                && report.is_constant_rank == oracle.constant_rank
                && report.common_rank == oracle_rank
                && report.is_cancelling == oracle.cancelling,
            || {
                format!(
                    "{name}: classifier (ell {}, cr {}, rank {:?}, canc {}) vs oracle (ell {}, cr {}, rank {:?}, canc {})",
                    report.is_elliptic,
                    report.is_constant_rank,
                    report.common_rank,
                    report.is_cancelling,
                    oracle.elliptic,
                    oracle.constant_rank,
                    oracle_rank,
                    oracle.cancelling
                )
            },
        )?;
        if name.starts_with("curl") {
            check(report.is_constant_rank && report.is_cancelling, || {
                format!("{name} should be constant rank and cancelling")
            })?;
        }
        summary.push(format!("{name}:{}", report.common_rank.map(|r| r.to_string()).unwrap_or("-".into())));
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} samples, ranks {} agree with oracle, {secs:.2} s", points.len(), summary.join(" ")))
}

fn criterion_2() -> Outcome {
    let op = catalog_operator("sym_gradient", 3).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let i = Complex64::new(0.0, 1.0);
    let mut worst_symbol: f64 = 0.0;
    for _ in 0..1000 {
        let r: f64 = rng.random_range(0.1..10.0);
        let xi: Vec<f64> = random_unit(&mut rng, 3).iter().map(|x| x * r).collect();
        for j in 0..3 {
            let alpha = MultiIndex::unit(3, j);
            let m = mihlin_korn_multiplier(&op, &alpha).map_err(err)?.evaluate(&xi).map_err(err)?;
            let b = op.symbol(&xi).map_err(err)?.map(|x| i * x);
            let prod = m * b;
            let want = i * xi[j];
            for r_ in 0..3 {
                for c in 0..3 {
                    let target = if r_ == c { want } else { Complex64::new(0.0, 0.0) };
                    worst_symbol = worst_symbol.max((prod[(r_, c)] - target).norm() / xi[j].abs().max(xi.iter().fold(0.0f64, |a, x| a.max(x.abs()))));
                }
            }
        }
    }
    check(worst_symbol <= 1e-10, || format!("symbol identity off by {worst_symbol:e}"))?;

    let grid = TorusGrid::new(3, 16).map_err(err)?;
    let u = random_bandlimited(grid, 3, 4, 21).map_err(err)?;
    let eps = apply_operator(&op, &u).map_err(err)?;
    let spectrum = transform(&u);
    let mut worst_grid: f64 = 0.0;
    for j in 0..3 {
        let rebuilt = apply_multiplier(&mihlin_korn_multiplier(&op, &MultiIndex::unit(3, j)).map_err(err)?, &eps)
            .map_err(err)?;
        // independent ∂_j u: multiply the spectrum by i ξ_j
        let comps: Vec<Vec<Complex64>> = spectrum
            .components()
            .iter()
            .map(|c| c.iter().enumerate().map(|(k, z)| z * i * grid.frequency_f64(k)[j]).collect())
            .collect();
        let exact = inverse(&SpectrumField::from_components(grid, comps).map_err(err)?);
        let rel = lp_norm(&rebuilt.sub(&exact).map_err(err)?, 2.0).map_err(err)? / lp_norm(&exact, 2.0).map_err(err)?;
        worst_grid = worst_grid.max(rel);
    }
    check(worst_grid <= 1e-8, || format!("grid reconstruction relative L² error {worst_grid:e}"))?;
    Ok(format!("symbol identity {worst_symbol:.1e} at 1000 ξ, 16³ reconstruction {worst_grid:.1e}"))
}

fn criterion_3() -> Outcome {
    let op = catalog_operator("curl_matrix_rowwise", 3).map_err(err)?;
    let rank = 6;
    let pi = kernel_projection_symbol(&op, rank).map_err(err)?;
    let pinv = pseudoinverse_symbol(&op, rank).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..10_000).map(|_| (random_unit(&mut rng, 3), random_unit(&mut rng, 9))).collect();
    let mut c: f64 = 0.0;
    for (xi, _) in &pairs {
        c = c.max(kms_core::linalg::spectral_norm(&pinv.evaluate_factored(xi).map_err(err)?.1));
    }
    let mut worst = f64::NEG_INFINITY;
    for (xi, v) in &pairs {
        let v = DMatrix::from_column_slice(9, 1, v);
        let p = pi.evaluate_factored(xi).map_err(err)?.1;
        let left = (&v - &p * &v).norm();
        let right = (op.symbol(xi).map_err(err)? * &v).norm();
        worst = worst.max(left - c * right);
    }
    check(worst <= 1e-10, || format!("violated by {worst:e} with C = {c}"))?;
    Ok(format!("C = {c:.6}, max(lhs − C·rhs) = {worst:.2e} over 10⁴ pairs"))
}

fn kms_sym_config(m: usize) -> Result<InequalityConfig, String> {
    InequalityConfig::new(
        InequalityId::KmsSym,
        catalog_operator("curl_matrix_rowwise", 3).map_err(err)?,
        Some(catalog_partmap("sym", 3).map_err(err)?),
        2.0,
        TorusGrid::new(3, m).map_err(err)?,
        false,
    )
    .map_err(err)
}

fn criterion_4() -> Outcome {
    let report = refinement_study(&kms_sym_config(8)?, &[8, 16, 32], &FieldFamily::default(), 0).map_err(err)?;
    let maxima = report.max_ratios();
    check(report.all_finite, || format!("non-finite maxima {maxima:?}"))?;
    check(report.growth < 0.25, || format!("growth {:.1}% across {maxima:?}", 100.0 * report.growth))?;
    let trials = report.entries.iter().all(|e| e.estimate.by_generator.iter().any(|g| g.generator == "random_bandlimited" && g.count == 50)
        && e.estimate.swept_frequencies > 0);
    check(trials, || "each size needs 50 random fields and a full sweep".into())?;
    Ok(format!("max ratios {:.6?}, growth {:.3}%", maxima, 100.0 * report.growth))
}

fn criterion_5() -> Outcome {
    let grid = TorusGrid::new(3, 16).map_err(err)?;
    let op = catalog_operator("curl_matrix_rowwise", 3).map_err(err)?;
    let report = necessity_demo(&catalog_partmap("tr", 3).map_err(err)?, &op, grid, 2.0).map_err(err)?;
    let NecessityOutcome::Demonstrated {
        witness,
        field_scale,
        uncorrected,
        corrected,
    } = report.outcome
    else {
        return Err("no witness found".into());
    };
    let u = uncorrected.sides;
    check(u.ratio.is_infinite() && u.rhs <= 1e-12, || format!("uncorrected {u:?}"))?;
    check(u.lhs >= 0.1 * field_scale, || format!("uncorrected lhs {} vs field scale {field_scale}", u.lhs))?;
    check(corrected.sides.lhs <= 1e-10, || format!("corrected lhs {:e}", corrected.sides.lhs))?;
    Ok(format!(
        "witness ξ = {:?}: uncorrected (lhs {:.3}, rhs {:.1e}) → ∞, corrected lhs {:.1e}",
        witness.xi, u.lhs, u.rhs, corrected.sides.lhs
    ))
}

fn criterion_6() -> Outcome {
    let grid = TorusGrid::new(3, 16).map_err(err)?;
    let op = catalog_operator("curl_matrix_rowwise", 3).map_err(err)?;
    let sym = catalog_partmap("sym", 3).map_err(err)?;
    let on_kernel = classify_on_kernel(&op, &sym, &SphereSampling::default_real(3, 0).map_err(err)?, RANK_TOL)
        .map_err(err)?;
    check(on_kernel.is_elliptic, || "Curl should be elliptic on ker sym".into())?;
    let desc = composed_correction_symbol(&op, &sym, on_kernel.common_rank.unwrap_or(0)).map_err(err)?;
    let mut worst: f64 = 0.0;
    for k in 1..grid.len() {
        let (c, m) = desc.evaluate_factored(&grid.frequency_f64(k)).map_err(err)?;
        worst = worst.max(c.norm() * m.norm());
    }
    check(worst <= 1e-12, || format!("correction reaches {worst:e}"))?;

    let make = |id, correction| {
        InequalityConfig::new(id, op.clone(), Some(sym.clone()), 2.0, grid, correction)
            .and_then(PreparedInequality::new)
            .map_err(err)
    };
    let with = make(InequalityId::KornConst, true)?;
    let without = make(InequalityId::KornEllip, false)?;
    let family = FieldFamily::default();
    let a = estimate_constant(&with, &family, 6).map_err(err)?;
    let b = estimate_constant(&without, &family, 6).map_err(err)?;
    let same = |x: &kms_lab::verifier::TrialResult, y: &kms_lab::verifier::TrialResult| {
        x.field == y.field
            && x.sides.lhs.to_bits() == y.sides.lhs.to_bits()
            && x.sides.part_term.to_bits() == y.sides.part_term.to_bits()
            && x.sides.operator_term.to_bits() == y.sides.operator_term.to_bits()
            && x.sides.ratio.to_bits() == y.sides.ratio.to_bits()
    };
    let identical = a.trials.len() == b.trials.len()
        && a.trials.iter().zip(&b.trials).all(|(x, y)| same(x, y))
        && a.sweep_worst.iter().zip(&b.sweep_worst).all(|(x, y)| same(x, y))
        && a.max_ratio.to_bits() == b.max_ratio.to_bits();
    check(identical, || format!("korn_const max {} vs korn_ellip max {}", a.max_ratio, b.max_ratio))?;
    Ok(format!(
        "correction max {worst:.1e} at all {} frequencies; {} trials bit-identical (max {:.6})",
        grid.len() - 1,
        a.trials.len() + a.sweep_worst.len(),
        a.max_ratio
    ))
}

fn criterion_7() -> Outcome {
    let op = catalog_operator("curl_matrix_rowwise", 3).map_err(err)?;
    let tr = catalog_partmap("tr", 3).map_err(err)?;
    let center = vec![PI; 3];
    let width = 0.5;
    let amplitude = default_bump_amplitude();

    let g16 = TorusGrid::new(3, 16).map_err(err)?;
    let field16 = bump_field(g16, &center, width, &amplitude).map_err(err)?;
    let sym = curl_riesz_crosscheck(&tr, &op, &field16, &[], CrosscheckMode::Symbol).map_err(err)?;
    check(sym.max_deviation <= 1e-12, || format!("symbol deviation {:e}", sym.max_deviation))?;

    let start = Instant::now();
    let g32 = TorusGrid::new(3, 32).map_err(err)?;
    let field32 = bump_field(g32, &center, width, &amplitude).map_err(err)?;
    let points = default_evaluation_points(&center, 0.5 * width);
    let quad = curl_riesz_crosscheck(&tr, &op, &field32, &points, CrosscheckMode::Quadrature).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    check(points.len() == 10, || format!("{} evaluation points", points.len()))?;
    check(quad.max_deviation <= 0.10, || format!("quadrature deviation {:.3}", quad.max_deviation))?;
    check(secs < 300.0, || format!("quadrature took {secs:.0} s"))?;
    Ok(format!(
        "symbol {:.1e} over {} frequencies; quadrature {:.1}% at 10 points on 32³ ({secs:.2} s)",
        sym.max_deviation,
        sym.frequencies_checked,
        100.0 * quad.max_deviation
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=8usize);
        let p = 1.0 + rng.random_range(1e-6..1.0 - 1e-6) * (n as f64 - 1.0);
        let chain = dual_exponent_chain(p, n).map_err(err)?;
        let q = n as f64 * p / (n as f64 * p - n as f64 + p);
        let rel = (q / (q - 1.0) - chain.p_star).abs() / chain.p_star;
        worst = worst.max(rel).max((chain.q - q).abs() / q);
    }
    check(worst <= 1e-12, || format!("q' vs p* relative gap {worst:e}"))?;
    let p1 = kms_core::sobolev_conjugate(1.0, 3).map_err(err)?;
    check(p1 == 1.5 && p1 == 3.0 / 2.0, || format!("p* at (1, 3) is {p1}"))?;
    Ok(format!("q/(q−1) = p* within {worst:.1e} (relative) at 50 (p, n); p*(1, 3) = {p1}"))
}

fn criterion_9() -> Outcome {
    let op = catalog_operator("curl_matrix_rowwise", 3).map_err(err)?;
    let tr = catalog_partmap("tr", 3).map_err(err)?;
    let report = p1_probe(&tr, &op, &[8, 16, 32], &FieldFamily::default(), 0).map_err(err)?;
    check(report.is_constant_rank && report.is_cancelling, || {
        format!("classifier on ker tr: constant rank {}, cancelling {}", report.is_constant_rank, report.is_cancelling)
    })?;
    let r = &report.refinement;
    let maxima = r.max_ratios();
    check(r.all_finite, || format!("non-finite maxima {maxima:?}"))?;
    check(r.growth < 0.25, || format!("growth {:.1}% across {maxima:?}", 100.0 * r.growth))?;
    Ok(format!("{}; max ratios {:.6?}, growth {:.3}%", report.verdict, maxima, 100.0 * r.growth))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let d = |name: &str| data.join(name).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["classify".into(), "--spec".into(), d("curl3.op"), "--on-kernel-of".into(), "tr".into()],
        vec!["verify".into(), "--config".into(), d("kms_sym_p2.cfg"), "--trials".into(), "8".into(), "--seed".into(), "5".into()],
        vec!["verify".into(), "--config".into(), d("korn_const_tr_uncorrected.cfg")],
        vec!["demo".into(), "necessity".into(), "--A".into(), "tr".into(), "--B".into(), "curl3".into(), "--grid".into(), "8".into()],
        vec!["crosscheck".into(), "curl-riesz".into(), "--mode".into(), "quadrature".into(), "--grid".into(), "16".into()],
        vec!["probe".into(), "p1".into(), "--A".into(), "tr".into(), "--B".into(), "curl3".into(), "--sizes".into(), "8,12".into(), "--trials".into(), "5".into()],
        vec!["field".into(), "gen".into(), "--generator".into(), "random".into(), "--grid".into(), "8".into(), "--d".into(), "9".into(), "--seed".into(), "9".into()],
        vec!["multiplier".into(), "dump".into(), "--B".into(), "curl3".into(), "--kind".into(), "correction".into(), "--A".into(), "tr".into(), "--grid".into(), "8".into()],
    ];
    let call = |args: &[String], workers: usize| -> Result<(), String> {
        let mut out = Vec::new();
        let mut errs = Vec::new();
        let argv = std::iter::once("kms".to_string()).chain(args.iter().cloned());
        match run_with(argv, Some(workers), &mut out, &mut errs) {
            0 => Ok(()),
            code => Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&errs))),
        }
    };
    for (idx, args) in runs.iter().enumerate() {
        let original = dir.path().join(format!("run{idx}.json"));
        let orig_s = original.to_string_lossy().into_owned();
        let mut first = args.clone();
        first.extend(["--out".into(), orig_s.clone()]);
        call(&first, 1)?;
        let recorded = std::fs::read(&original).map_err(err)?;
        for workers in [2, 4] {
            let again = dir.path().join(format!("run{idx}_w{workers}.json")).to_string_lossy().into_owned();
            call(&["replay".into(), "--manifest".into(), orig_s.clone(), "--check".into(), "--out".into(), again.clone()], workers)?;
            check(std::fs::read(&again).map_err(err)? == recorded, || format!("{} differs with {workers} workers", args[0]))?;
        }
    }
    Ok(format!("{} manifests replayed with 2 and 4 workers, all bit-identical to the 1-worker run", runs.len()))
}

fn main() {
    // libtest flags such as --list or --nocapture may be forwarded; --list gets an empty answer
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("classification suite", criterion_1),
        ("Mihlin–Korn reconstruction", criterion_2),
        ("per-frequency Fonseca–Müller", criterion_3),
        ("KMS:sym boundedness", criterion_4),
        ("necessity of the correction", criterion_5),
        ("elliptic degeneration", criterion_6),
        ("curl–Riesz cross-check", criterion_7),
        ("exponent arithmetic", criterion_8),
        ("p = 1 probe", criterion_9),
        ("reproducibility", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
