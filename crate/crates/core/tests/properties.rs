use l1lab::certify::support_error_bound;
use l1lab::lab::stats::{isotonic, wilson_interval};
use l1lab::linalg::{complement, l1_norm, null_space_basis, restricted_l1};
use l1lab::lp::{l1_minimize, weighted_l1_minimize, WeightVector};
use l1lab::recover::select_top_k;
use l1lab::sampling::sample_gaussian_matrix;
use l1lab::signals::{generate_model_signal, sparse_gaussian_signal};
use l1lab::Seed;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (3usize..24).prop_flat_map(|n| (1usize..n).prop_map(move |m| (m, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l1_splits_over_a_set_and_its_complement(
        v in prop::collection::vec(-1e3f64..1e3, 1..40),
        mask in prop::collection::vec(any::<bool>(), 40),
    ) {
        let set: Vec<usize> = (0..v.len()).filter(|&i| mask[i]).collect();
        let rest = complement(&set, v.len());
        let total = restricted_l1(&v, &set).unwrap() + restricted_l1(&v, &rest).unwrap();
        prop_assert!((total - l1_norm(&v)).abs() <= 1e-12 * l1_norm(&v).max(1.0));
    }

    #[test]
    fn top_k_matches_brute_force(v in prop::collection::vec(-4i32..4, 0..14), k in 0usize..16) {
        let v: Vec<f64> = v.into_iter().map(f64::from).collect();
        let got = select_top_k(&v, k);
        // Rank by (magnitude desc, index asc) and take the first k.
        let mut brute: Vec<usize> = (0..v.len())
            .filter(|&i| {
                let better = (0..v.len())
                    .filter(|&j| v[j].abs() > v[i].abs() || (v[j].abs() == v[i].abs() && j < i))
                    .count();
                better < k
            })
            .collect();
        brute.sort_unstable();
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn null_space_is_orthonormal_and_annihilated((m, n) in shape(), seed in any::<u64>()) {
        let a = sample_gaussian_matrix(m, n, Seed(seed)).unwrap();
        let basis = null_space_basis(&a).unwrap();
        prop_assert_eq!(basis.cols(), n - m);
        let an = a.mul(&basis);
        prop_assert!(an.max_abs() <= 1e-10 * a.max_abs() * n as f64);
        let gram = basis.transpose().mul(&basis);
        for i in 0..gram.rows() {
            for j in 0..gram.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - target).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn wilson_interval_contains_estimate(trials in 1usize..500, frac in 0.0f64..=1.0) {
        let s = (frac * trials as f64).round() as usize;
        let (lo, hi) = wilson_interval(s, trials);
        let p = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn isotonic_is_monotone_and_mean_preserving(
        v in prop::collection::vec(0.0f64..1.0, 1..20),
        w in prop::collection::vec(0.1f64..5.0, 20),
        increasing in any::<bool>(),
    ) {
        let w = &w[..v.len()];
        let out = isotonic(&v, w, increasing);
        for pair in out.windows(2) {
            if increasing {
                prop_assert!(pair[0] <= pair[1] + 1e-12);
            } else {
                prop_assert!(pair[0] + 1e-12 >= pair[1]);
            }
        }
        let mean = |x: &[f64]| x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!((mean(&out) - mean(&v)).abs() <= 1e-9);
    }

    #[test]
    fn support_bound_is_sum_of_two_terms(
        c in 1.001f64..1e4, kappa in 0.0f64..50.0, a1 in 0.01f64..10.0, delta in 0.0f64..5.0,
    ) {
        let b = support_error_bound(c, kappa, a1, delta).unwrap().value;
        let closed = 4.0 * c * (1.0 + kappa) * delta / ((c - 1.0) * a1);
        prop_assert!((b - closed).abs() <= 1e-12 * closed.max(1e-300));
    }

    #[test]
    fn model_signal_invariants(
        n in 2usize..80, frac in 0.0f64..1.0, tail_frac in 0.0f64..1.0, a1 in 0.1f64..5.0, seed in any::<u64>(),
    ) {
        let k = (frac * n as f64) as usize;
        let k_total = k + ((n - k) as f64 * tail_frac) as usize;
        let delta = if k_total > k { 0.3 } else { 0.0 };
        let sig = generate_model_signal(n, k, a1, delta, k_total, Seed(seed)).unwrap();
        prop_assert!(sig.strong_set.iter().all(|&i| sig.x[i].abs() >= a1));
        let rest = complement(&sig.strong_set, n);
        prop_assert!(restricted_l1(&sig.x, &rest).unwrap() <= delta * (1.0 + 1e-12));
        prop_assert_eq!(sig.x.iter().filter(|v| **v != 0.0).count(), k_total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn l1_objective_scales_with_measurements(seed in any::<u64>(), alpha in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0]) {
        let a = sample_gaussian_matrix(8, 16, Seed(seed)).unwrap();
        let x = sparse_gaussian_signal(16, 5, Seed(seed ^ 1)).unwrap();
        let y = a.mul_vec(&x);
        let base = l1_minimize(&a, &y).unwrap().objective;
        let ys: Vec<f64> = y.iter().map(|v| alpha * v).collect();
        let scaled = l1_minimize(&a, &ys).unwrap().objective;
        prop_assert!((scaled - alpha.abs() * base).abs() <= 1e-8 * alpha.abs() * base.max(1e-12));
    }

    #[test]
    fn scaling_the_weights_scales_the_objective(seed in any::<u64>(), c in 0.05f64..20.0) {
        let a = sample_gaussian_matrix(8, 16, Seed(seed)).unwrap();
        let x = sparse_gaussian_signal(16, 4, Seed(seed ^ 2)).unwrap();
        let y = a.mul_vec(&x);
        let w: Vec<f64> = (0..16).map(|i| 1.0 + (i % 5) as f64).collect();
        let base = weighted_l1_minimize(&a, &y, &WeightVector::new(w.clone()).unwrap()).unwrap();
        let scaled = weighted_l1_minimize(&a, &y, &WeightVector::new(w).unwrap().scaled(c).unwrap()).unwrap();
        prop_assert!((scaled.objective - c * base.objective).abs() <= 1e-8 * c * base.objective.max(1e-12));
    }
}
