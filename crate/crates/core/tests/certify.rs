mod common;

use l1lab::certify::{
    check_weak_robustness, compute_kappa, critical_c, estimate_best_c, RobustnessCertificate,
};
use l1lab::linalg::{complement, l1_norm};
use l1lab::recover::recover_l1;
use l1lab::sampling::sample_gaussian_matrix;
use l1lab::signals::generate_model_signal;
use l1lab::Seed;
use rand::seq::index::sample;
use rand::Rng;

#[test]
fn kappa_matches_null_sphere_grid() {
    let mut rng = Seed(2024).rng();
    for case in 0..30 {
        let n = rng.random_range(4..=10);
        let d = rng.random_range(1..=3usize.min(n - 1));
        let m = n - d;
        let k = rng.random_range(1..=m.min(5));
        let a = sample_gaussian_matrix(m, n, Seed(1000 + case)).unwrap();
        let mut set = sample(&mut rng, n, k).into_vec();
        set.sort_unstable();
        let exact = compute_kappa(&a, &set).unwrap();
        let grid = common::kappa_grid(&a, &set);
        assert!(grid <= exact + 1e-9, "case {case}: grid {grid} above exact {exact}");
        assert!(grid >= 0.98 * exact, "case {case}: grid {grid} far below exact {exact}");
    }
}

#[test]
fn small_gaussian_is_robust_for_singletons() {
    let mut holds = 0;
    for s in 0..20 {
        let a = sample_gaussian_matrix(6, 12, Seed(s)).unwrap();
        let r = check_weak_robustness(&a, &[3], &[1.7], 1.5).unwrap();
        assert!(r.margin <= 1e-12);
        if r.holds {
            assert!(r.margin >= -1e-8);
            if r.strict_margin > 0.0 {
                holds += 1;
            }
        } else {
            assert!(r.strict_margin < 1e-7);
        }
    }
    assert!(holds > 10, "strictly robust in only {holds}/20 seeds");
}

#[test]
fn best_c_agrees_with_direct_threshold_and_grid() {
    let mut above_one = 0;
    for s in 0..12 {
        let a = sample_gaussian_matrix(10, 20, Seed(50 + s)).unwrap();
        let set = [2, 11];
        let x_k = [1.3, -0.6];
        let best = estimate_best_c(&a, &set, &x_k).unwrap();
        let direct = critical_c(&a, &set, &x_k).unwrap().unwrap();
        if direct > 1.0 + 1e-3 {
            above_one += 1;
            assert!((best - direct).abs() <= 2e-3, "seed {s}: bisection {best} vs direct {direct}");
        } else {
            assert_eq!(best, 1.0);
        }
        // A null-space grid over n - m = 10 dimensions is out of reach; check a
        // low-dimensional instance instead.
        let small = sample_gaussian_matrix(5, 8, Seed(90 + s)).unwrap();
        let c_lp = critical_c(&small, &[0, 4], &[2.0, 1.0]).unwrap().unwrap();
        let c_grid = common::critical_c_grid(&small, &[0, 4], &[2.0, 1.0]);
        assert!(c_grid >= c_lp - 1e-9 && c_grid <= 1.02 * c_lp, "seed {s}: {c_lp} vs grid {c_grid}");
    }
    assert!(above_one >= 8, "best C > 1 in only {above_one}/12 seeds");
}

#[test]
fn robust_instances_satisfy_error_inequalities() {
    // Whenever the condition holds for (K, x_K, C), any tail keeps the ℓ1
    // solution within the two weak-robustness inequalities.
    let (n, m) = (30, 18);
    for s in 0..15 {
        let a = sample_gaussian_matrix(m, n, Seed(300 + s)).unwrap();
        let sig = generate_model_signal(n, 4, 1.0, 0.05 * (1 + s % 3) as f64, 12, Seed(400 + s)).unwrap();
        let set = &sig.strong_set;
        let x_k: Vec<f64> = set.iter().map(|&i| sig.x[i]).collect();
        let c = 1.5;
        if !check_weak_robustness(&a, set, &x_k, c).unwrap().holds {
            continue;
        }
        let est = recover_l1(&a, &a.mul_vec(&sig.x)).unwrap().estimate;
        let rest = complement(set, n);
        let tail = l1_norm(&rest.iter().map(|&i| sig.x[i]).collect::<Vec<_>>());
        let off: f64 = rest.iter().map(|&i| (sig.x[i] - est[i]).abs()).sum();
        let on_loss = l1_norm(&x_k) - set.iter().map(|&i| est[i].abs()).sum::<f64>();
        assert!(off <= 2.0 * c / (c - 1.0) * tail + 1e-6);
        assert!(on_loss <= 2.0 / (c - 1.0) * tail + 1e-6);
    }
}

#[test]
fn certificate_json_shape() {
    let a = sample_gaussian_matrix(6, 12, Seed(5)).unwrap();
    let cert = RobustnessCertificate::compute(&a, &[1, 7], &[1.0, -2.0]).unwrap();
    let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
    for key in ["K", "kappa", "best_C", "margin", "kappa_method", "c_method"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["kappa_method"], "exact-enumeration");
    let back: RobustnessCertificate = serde_json::from_value(v).unwrap();
    assert_eq!(back, cert);
}
