use graphpsd_core::design::{greedy_design, DesignObjective, ObjectiveKind};
use graphpsd_core::graph::{build_laplacian, parse_graph, random_sensor_graph, write_graph};
use graphpsd_core::sampling::{
    build_spectral_model, build_vertex_model, estimate_spectrum_spectral, subsampled_covariance, SamplingPattern,
};
use graphpsd_core::spectral::{eigendecompose, lowpass_exp_filter, true_covariance, true_power_spectrum};
use graphpsd_core::DMatrix;
use proptest::prelude::*;

fn instance(n: usize, seed: u64) -> (graphpsd_core::ShiftOperator, graphpsd_core::SpectralBasis) {
    let s = build_laplacian(&random_sensor_graph(n, 3, seed).unwrap());
    let b = eigendecompose(&s).unwrap();
    (s, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplacian_is_psd_with_constant_null_vector(n in 4usize..30, seed in 0u64..1000) {
        let (s, b) = instance(n, seed);
        let m = s.matrix();
        let ones = DMatrix::from_element(n, 1, 1.0);
        prop_assert!((m * ones).amax() < 1e-12);
        prop_assert!(b.eigenvalues().iter().all(|&l| l > -1e-10));
        let u = b.eigenvectors();
        let orth = u.transpose() * u - DMatrix::identity(n, n);
        prop_assert!(orth.amax() < 1e-10);
    }

    #[test]
    fn spectrum_estimate_ignores_selection_order(n in 8usize..20, seed in 0u64..500, shuffle in any::<u64>()) {
        let (_, b) = instance(n, seed);
        let k = n.min(8);
        let mut sel: Vec<usize> = (0..n).collect();
        let r = shuffle as usize;
        sel.rotate_left(r % n);
        sel.truncate(k);
        let mut rev = sel.clone();
        rev.reverse();
        let p1 = SamplingPattern::new(n, sel).unwrap();
        let p2 = SamplingPattern::new(n, rev).unwrap();
        prop_assert_eq!(&p1, &p2);
        let f = lowpass_exp_filter(&b, 3.0, 4).unwrap();
        let cov = true_covariance(&f, &b);
        let e1 = estimate_spectrum_spectral(&subsampled_covariance(&cov, &p1).unwrap(), &build_spectral_model(&b, &p1).unwrap()).unwrap();
        let e2 = estimate_spectrum_spectral(&subsampled_covariance(&cov, &p2).unwrap(), &build_spectral_model(&b, &p2).unwrap()).unwrap();
        prop_assert_eq!(e1.p_hat, e2.p_hat);
    }

    #[test]
    fn full_observation_recovers_population_spectrum(n in 5usize..25, seed in 0u64..500) {
        let (_, b) = instance(n, seed);
        let f = lowpass_exp_filter(&b, 2.0, 3).unwrap();
        let full = SamplingPattern::full(n);
        let cov = true_covariance(&f, &b);
        let est = estimate_spectrum_spectral(&subsampled_covariance(&cov, &full).unwrap(), &build_spectral_model(&b, &full).unwrap()).unwrap();
        let p = true_power_spectrum(&f, &b).into_inner();
        prop_assert!(est.rank_ok);
        let err = est.p_hat.iter().zip(p.iter()).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-9 * p.amax());
    }

    #[test]
    fn vertex_model_has_k_squared_rows(n in 5usize..20, seed in 0u64..500, k in 1usize..5, q in 1usize..5) {
        let (s, _) = instance(n, seed);
        let pat = SamplingPattern::new(n, (0..k).collect()).unwrap();
        let m = build_vertex_model(&s, &pat, q).unwrap();
        prop_assert_eq!(m.matrix().shape(), (k * k, q));
    }

    #[test]
    fn greedy_prefixes_are_smaller_greedy_runs(n in 6usize..14, seed in 0u64..500, k in 1usize..6) {
        let (_, b) = instance(n, seed);
        let obj = DesignObjective::spectral(&b, ObjectiveKind::LogDetEps, None).unwrap();
        let (_, long) = greedy_design(&obj, 6, n).unwrap();
        let (short, _) = greedy_design(&obj, k, n).unwrap();
        prop_assert_eq!(long.prefix_pattern(n, k).unwrap(), short);
    }

    #[test]
    fn graph_text_round_trip(n in 3usize..40, seed in 0u64..1000) {
        let g = random_sensor_graph(n, 2.min(n - 1), seed).unwrap();
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }
}
