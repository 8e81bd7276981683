use kms_core::{
    catalog_operator, classify, classify_on_kernel, dual_exponent_chain, kernel_projection_symbol,
    mihlin_korn_multiplier, multiindex_enumerate, pseudoinverse_symbol, restrict_symbol, sobolev_conjugate,
    DMatrix, MultiIndex, OperatorSpec, PartMap, SamplingMode, SphereSampling, RANK_TOL,
};
use proptest::prelude::*;

const CATALOG: [&str; 6] = [
    "gradient",
    "sym_gradient",
    "curl_vector",
    "curl_matrix_rowwise",
    "divergence",
    "sym_curl_matrix",
];

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 1e-3).then(|| v.iter().map(|x| x / r).collect())
}

fn frob(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Random operator with small dimensions; coefficients in [-1, 1].
fn arb_operator() -> impl Strategy<Value = OperatorSpec> {
    (2usize..=3, 1usize..=3, 1usize..=3, 1u32..=2)
        .prop_flat_map(|(n, d, l, k)| {
            let count = multiindex_enumerate(n, k).len();
            (
                Just((n, d, l, k)),
                prop::collection::vec(prop::collection::vec(-1.0f64..1.0, l * d), count),
            )
        })
        .prop_filter_map("all coefficients zero", |((n, d, l, k), mats)| {
            let coeffs = multiindex_enumerate(n, k)
                .into_iter()
                .zip(mats)
                .map(|(a, m)| (a, DMatrix::from_row_slice(l, d, &m)));
            OperatorSpec::new("random", n, d, l, k, coeffs).ok()
        })
}

/// Random part map on ℝ^d whose rank is usually below d.
fn arb_partmap() -> impl Strategy<Value = PartMap> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(d, r)| (Just((d, r)), prop::collection::vec(-1.0f64..1.0, r * d)))
        .prop_map(|((d, r), entries)| {
            let mut m = DMatrix::from_row_slice(r, d, &entries);
            // a repeated row keeps the map rank-deficient half the time
            if r >= 2 {
                let first = m.row(0).into_owned();
                m.set_row(r - 1, &first);
            }
            PartMap::new("random", m).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbol_homogeneity(op in arb_operator(), xi in prop::collection::vec(-2.0f64..2.0, 3), c in -3.0f64..3.0) {
        let xi = &xi[..op.n()];
        let scaled: Vec<f64> = xi.iter().map(|x| c * x).collect();
        let a = op.symbol(&scaled).unwrap();
        let b = op.symbol(xi).unwrap() * c.powi(op.k() as i32);
        let scale = frob(&op.symbol(xi).unwrap()) * c.abs().powi(op.k() as i32);
        prop_assert!(frob(&(a - b)) <= 1e-12 * scale.max(1e-300) + 1e-300);
    }

    #[test]
    fn projector_algebra(part in arb_partmap()) {
        let pk = part.proj_ker();
        let pp = part.proj_perp();
        let d = part.d();
        prop_assert!(frob(&(pk * pk - pk)) <= 1e-12);
        prop_assert!(frob(&(pp - (DMatrix::identity(d, d) - pk))) <= 1e-12);
        prop_assert!(frob(&(pk - pk.transpose())) <= 1e-12);
        prop_assert!(frob(&(part.matrix() * pk)) <= 1e-12 * frob(part.matrix()).max(1.0));
        prop_assert_eq!(part.kernel_dim() + part.rank(), d);
    }

    #[test]
    fn pointwise_injectivity(part in arb_partmap(), v in prop::collection::vec(-1.0f64..1.0, 5)) {
        let v = &v[..part.d()];
        let perp = part.apply_proj_perp(v);
        let av = part.apply(v);
        let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
        match part.injectivity_constant() {
            Some(c) => prop_assert!(norm(&perp) <= c * norm(&av) * (1.0 + 1e-10) + 1e-12),
            None => prop_assert!(norm(&perp) <= 1e-12),
        }
    }

    #[test]
    fn restriction_consistency(
        name in prop::sample::select(&CATALOG[..]),
        xi in prop::collection::vec(-1.0f64..1.0, 3),
        eta in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let op = catalog_operator(name, 3).unwrap();
        for part_name in ["sym", "skew", "tr", "dev"] {
            let Ok(part) = kms_core::catalog_partmap_with_dim(part_name, 3, op.d()) else { continue };
            let restricted = restrict_symbol(&op, &part).unwrap();
            let eta = DMatrix::from_column_slice(restricted.d(), 1, &eta[..restricted.d()]);
            let direct = op.symbol(&xi).unwrap() * part.kernel_basis() * &eta;
            let via = restricted.symbol(&xi).unwrap() * &eta;
            prop_assert!(frob(&(direct - via)) <= 1e-12);
        }
    }

    #[test]
    fn exponent_chain(p_frac in 0.001f64..0.999, n in 2usize..=8) {
        let p = 1.0 + p_frac * (n as f64 - 1.0);
        let chain = dual_exponent_chain(p, n).unwrap();
        prop_assert!((chain.q_dual - chain.p_star).abs() <= 1e-12 * chain.p_star);
        prop_assert!((chain.p_star - sobolev_conjugate(p, n).unwrap()).abs() == 0.0);
    }

    #[test]
    fn projection_and_pseudoinverse_identities(
        name in prop::sample::select(&CATALOG[..]),
        raw in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let Some(xi) = unit(raw) else { return Ok(()) };
        let op = catalog_operator(name, 3).unwrap();
        let rank = classify(&op, &SphereSampling::default_real(3, 0).unwrap(), RANK_TOL).unwrap().common_rank.unwrap();
        let pi = kernel_projection_symbol(&op, rank).unwrap().evaluate_factored(&xi).unwrap().1;
        let pinv = pseudoinverse_symbol(&op, rank).unwrap().evaluate_factored(&xi).unwrap().1;
        let b = op.symbol(&xi).unwrap();
        let d = op.d();
        prop_assert!(frob(&(&pi * &pi - &pi)) <= 1e-12);
        prop_assert!(frob(&(&pi - pi.transpose())) <= 1e-12);
        prop_assert!(frob(&(&b * &pi)) <= 1e-12);
        prop_assert!(frob(&(&pinv * &b + &pi - DMatrix::identity(d, d))) <= 1e-12);
    }

    #[test]
    fn reconstruction_identity(raw in prop::collection::vec(-1.0f64..1.0, 3), j in 0usize..3) {
        let Some(xi) = unit(raw) else { return Ok(()) };
        let op = catalog_operator("sym_gradient", 3).unwrap();
        let alpha = MultiIndex::unit(3, j);
        let (c, m) = mihlin_korn_multiplier(&op, &alpha).unwrap().evaluate_factored(&xi).unwrap();
        // m(ξ)·i·B[ξ] = i ξ_j Id, and c = -i here
        let lhs = (&m * op.symbol(&xi).unwrap()).map(|x| c * num_complex_i() * x);
        for r in 0..3 {
            for s in 0..3 {
                let want = if r == s { xi[j] } else { 0.0 };
                let got = lhs[(r, s)];
                prop_assert!((got.im - want).abs() <= 1e-10 && got.re.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn classifier_consistency(op in arb_operator()) {
        let s = SphereSampling::quasi_uniform(op.n(), 64, 3, SamplingMode::Real).unwrap();
        let r = classify(&op, &s, RANK_TOL).unwrap();
        prop_assert_eq!(r.rank_histogram.values().sum::<usize>(), r.sample_count);
        prop_assert_eq!(r.is_elliptic, r.is_constant_rank && r.common_rank == Some(op.d()));
        prop_assert_eq!(r.is_cancelling, r.residual_image_dim == 0);
    }

    #[test]
    fn sampling_is_unit_and_deterministic(n in 2usize..=6, count in 1usize..200, seed in any::<u64>()) {
        let a = SphereSampling::quasi_uniform(n, count, seed, SamplingMode::Real).unwrap();
        let b = SphereSampling::quasi_uniform(n, count, seed, SamplingMode::Real).unwrap();
        for (p, q) in a.real_points().zip(b.real_points()) {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((r - 1.0).abs() <= 1e-14);
            prop_assert_eq!(p, q);
        }
    }
}

fn num_complex_i() -> kms_core::Complex64 {
    kms_core::Complex64::new(0.0, 1.0)
}

#[test]
fn gradient_is_cancelling_in_every_dimension() {
    for n in 2..=5 {
        let op = catalog_operator("gradient", n).unwrap();
        let r = classify(&op, &SphereSampling::default_real(n, 0).unwrap(), RANK_TOL).unwrap();
        assert!(r.is_cancelling && r.is_elliptic, "n = {n}");
    }
}

#[test]
fn curl_on_kernel_of_sym_is_elliptic() {
    let op = catalog_operator("curl_matrix_rowwise", 3).unwrap();
    let sym = kms_core::catalog_partmap("sym", 3).unwrap();
    let tr = kms_core::catalog_partmap("tr", 3).unwrap();
    let s = SphereSampling::default_real(3, 0).unwrap();
    let on_sym = classify_on_kernel(&op, &sym, &s, RANK_TOL).unwrap();
    let on_tr = classify_on_kernel(&op, &tr, &s, RANK_TOL).unwrap();
    assert!(on_sym.is_elliptic);
    assert!(!on_tr.is_elliptic && on_tr.is_constant_rank && on_tr.is_cancelling);
}
