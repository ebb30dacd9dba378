use l1lab::lab::{estimate_rho_f, RhoConfig, RunOptions};
use l1lab::linalg::{max_abs, sub};
use l1lab::recover::{recover_l1, recover_weighted, relative_l2_error, reweight_candes, reweight_modified, WeightVector, SUCCESS_TOL};
use l1lab::sampling::sample_gaussian_matrix;
use l1lab::signals::{generate_model_signal, sparse_gaussian_signal};
use l1lab::Seed;

#[test]
fn huge_off_support_weights_force_the_support() {
    for s in 0..10 {
        let a = sample_gaussian_matrix(3, 6, Seed(s)).unwrap();
        let x = sparse_gaussian_signal(6, 2, Seed(100 + s)).unwrap();
        let support: Vec<usize> = (0..6).filter(|&i| x[i] != 0.0).collect();
        let w = WeightVector::two_level(6, &support, 1.0, 1e6).unwrap();
        let r = recover_weighted(&a, &a.mul_vec(&x), &w).unwrap();
        assert!(max_abs(&sub(&r.estimate, &x)) <= 1e-6, "seed {s}");
    }
}

#[test]
fn reweighting_does_not_lose_to_plain_l1() {
    let (mut plain, mut candes) = (0, 0);
    for s in 0..50 {
        let a = sample_gaussian_matrix(22, 40, Seed(200 + s)).unwrap();
        let x = sparse_gaussian_signal(40, 9, Seed(300 + s)).unwrap();
        let y = a.mul_vec(&x);
        plain += recover_l1(&a, &y).unwrap().success_vs(&x, SUCCESS_TOL) as usize;
        candes += reweight_candes(&a, &y, 0.1, 4).unwrap().success_vs(&x, SUCCESS_TOL) as usize;
    }
    assert!(candes >= plain, "reweighted {candes}/50 vs plain {plain}/50");
}

#[test]
fn two_stage_is_exact_without_tail() {
    for s in 0..10 {
        let a = sample_gaussian_matrix(33, 60, Seed(400 + s)).unwrap();
        let sig = generate_model_signal(60, 5, 1.0, 0.0, 5, Seed(500 + s)).unwrap();
        let r = reweight_modified(&a, &a.mul_vec(&sig.x), 5, 10.0).unwrap();
        assert_eq!(r.selected_set, sig.support);
        assert!(max_abs(&sub(&r.estimate, &sig.x)) <= 1e-6);
        assert!(r.residual <= 1e-8 * (1.0 + max_abs(&a.mul_vec(&sig.x))));
    }
}

#[test]
fn two_stage_beats_plain_l1_above_the_threshold() {
    let n = 200;
    let m = 111;
    let rho = estimate_rho_f(
        &RhoConfig { delta: 0.555, n, trials_per_point: 100, rho_grid: RhoConfig::default_grid(), seed: Seed(9) },
        RunOptions { workers: 0, record_timing: false },
    )
    .unwrap()
    .midpoint();
    let k_total = (1.1 * rho * m as f64).round() as usize;
    let k_strong = (0.8 * rho * m as f64).floor() as usize;
    let (mut plain_fails, mut two_stage_wins, mut both) = (0, 0, 0);
    for s in 0..100 {
        let a = sample_gaussian_matrix(m, n, Seed(600 + s)).unwrap();
        let sig = generate_model_signal(n, k_strong, 1.0, 0.01, k_total, Seed(700 + s)).unwrap();
        let y = a.mul_vec(&sig.x);
        let p = relative_l2_error(&recover_l1(&a, &y).unwrap().estimate, &sig.x) > SUCCESS_TOL;
        let w = reweight_modified(&a, &y, k_strong, 10.0).unwrap().success_vs(&sig.x, SUCCESS_TOL);
        plain_fails += p as usize;
        two_stage_wins += w as usize;
        both += (p && w) as usize;
    }
    assert!(plain_fails > 50, "plain ℓ1 failed only {plain_fails}/100");
    assert!(two_stage_wins > 50, "two-stage succeeded only {two_stage_wins}/100");
    assert!(both > 50, "plain failed and two-stage succeeded together in {both}/100");
}
