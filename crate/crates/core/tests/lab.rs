use l1lab::lab::io::{read_trials_csv, write_trials_csv};
use l1lab::lab::{
    estimate_delta_c, estimate_rho_f, rho_trials, run_certificate_campaign, summarize, sweep_figure1, CampaignConfig,
    DeltaCConfig, RhoConfig, RunOptions, SweepConfig,
};
use l1lab::Seed;

fn opts(workers: usize) -> RunOptions {
    RunOptions { workers, record_timing: false }
}

#[test]
fn rho_extremes() {
    let cfg = RhoConfig { delta: 0.555, n: 100, trials_per_point: 100, rho_grid: vec![0.05, 1.0], seed: Seed(1) };
    let pts = summarize(&cfg.rho_grid, &rho_trials(&cfg, opts(0)).unwrap());
    assert!(pts[0].p_success >= 0.95, "{:?}", pts[0]);
    assert!(pts[1].p_success <= 0.05, "{:?}", pts[1]);
}

#[test]
fn rho_curve_is_smoothed_monotone() {
    let cfg = RhoConfig { delta: 0.5, n: 60, trials_per_point: 40, rho_grid: RhoConfig::default_grid(), seed: Seed(2) };
    let curve = estimate_rho_f(&cfg, opts(0)).unwrap();
    assert!(curve.isotonic.windows(2).all(|w| w[0] >= w[1]));
    for p in &curve.points {
        assert!(p.ci_low <= p.p_success && p.p_success <= p.ci_high);
    }
    assert!(curve.fit.midpoint > 0.1 && curve.fit.midpoint < 0.6);
    assert!(curve.fit.midpoint_ci_low < curve.fit.midpoint && curve.fit.midpoint < curve.fit.midpoint_ci_high);
}

fn delta_c(gamma1: f64, p1: f64, p2: f64, ratio: f64, seed: u64) -> l1lab::lab::ThresholdCurve {
    delta_c_on(gamma1, p1, p2, ratio, seed, l1lab::lab::experiments::linspace(0.05, 0.75, 15))
}

fn delta_c_on(gamma1: f64, p1: f64, p2: f64, ratio: f64, seed: u64, grid: Vec<f64>) -> l1lab::lab::ThresholdCurve {
    let cfg = DeltaCConfig {
        gamma1,
        p1,
        p2,
        weight_ratio: ratio,
        n: 100,
        trials_per_point: 60,
        delta_grid: grid,
        seed: Seed(seed),
    };
    estimate_delta_c(&cfg, opts(0)).unwrap()
}

#[test]
fn unweighted_delta_c_matches_plain_threshold() {
    let curve = delta_c(1.0, 0.15, 0.0, 1.0, 3);
    let fit = curve.fit;
    // Plain ℓ1 with exactly 15 nonzeros should succeed about half the time near δ̂_c.
    let probe = |delta: f64| {
        let m = (delta * 100.0).round();
        let cfg = RhoConfig { delta: m / 100.0, n: 100, trials_per_point: 100, rho_grid: vec![15.0 / m], seed: Seed(4) };
        summarize(&cfg.rho_grid, &rho_trials(&cfg, opts(0)).unwrap())[0].clone()
    };
    let below = probe(fit.midpoint_ci_low - 0.03);
    let above = probe(fit.midpoint_ci_high + 0.03);
    assert!(below.ci_low < 0.5, "plain ℓ1 already reliable below δ̂_c: {below:?}");
    assert!(above.ci_high > 0.5, "plain ℓ1 still failing above δ̂_c: {above:?}");
}

#[test]
fn uninformative_classes_do_not_help() {
    let w1 = delta_c(0.3, 0.15, 0.15, 1.0, 5).fit;
    let w10 = delta_c(0.3, 0.15, 0.15, 10.0, 5).fit;
    let width = w1.midpoint_ci_high - w1.midpoint_ci_low;
    assert!(w10.midpoint >= w1.midpoint - width, "{} vs {}", w10.midpoint, w1.midpoint);
}

#[test]
fn known_support_is_easy() {
    let uniform = delta_c(0.1, 1.0, 0.0, 1.0, 6).fit;
    // The weighted transition sits near m = |support|, below the coarse default grid.
    let weighted = delta_c_on(0.1, 1.0, 0.0, 10.0, 6, l1lab::lab::experiments::linspace(0.01, 0.2, 20)).fit;
    assert!(weighted.midpoint_ci_high < uniform.midpoint_ci_low, "{weighted:?} vs {uniform:?}");
    assert!(weighted.midpoint < 0.5 * uniform.midpoint);
}

#[test]
fn trial_logs_round_trip_and_reject_tampering() {
    let cfg = RhoConfig { delta: 0.5, n: 30, trials_per_point: 10, rho_grid: vec![0.2, 0.8], seed: Seed(7) };
    let trials = rho_trials(&cfg, opts(1)).unwrap();
    let mut buf = Vec::new();
    write_trials_csv(&mut buf, &trials).unwrap();
    let back = read_trials_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), trials.len());
    for (a, b) in back.iter().zip(&trials) {
        assert_eq!(a.success, b.success);
        assert_eq!(a.rel_l2_error, b.rel_l2_error);
    }
    let text = String::from_utf8(buf).unwrap();
    let flipped = text.replacen(",true,", ",false,", 1);
    assert_ne!(flipped, text);
    assert!(read_trials_csv(flipped.as_bytes()).is_err());
}

#[test]
fn campaign_is_schedule_independent() {
    let cfg = CampaignConfig::standard(12, Seed(8));
    let one = serde_json::to_string(&run_certificate_campaign(&cfg, opts(1)).unwrap()).unwrap();
    let three = serde_json::to_string(&run_certificate_campaign(&cfg, opts(3)).unwrap()).unwrap();
    assert_eq!(one, three);
}

#[test]
fn zero_tail_campaign() {
    let cfg = CampaignConfig { k_total: 6, delta: 0.0, ..CampaignConfig::standard(20, Seed(9)) };
    let report = run_certificate_campaign(&cfg, opts(0)).unwrap();
    assert_eq!(report.violations, 0);
    for inst in report.instances.iter().filter(|i| i.certified) {
        assert_eq!(inst.support_bound, Some(0.0));
        if inst.l1_error <= 1e-9 {
            assert_eq!(inst.outside_support, 0);
        }
    }
}

#[test]
fn failing_instances_are_not_certified() {
    let cfg = CampaignConfig { n: 20, m: 8, instances: 20, k_strong: 6, k_total: 8, a1: 1.0, delta: 0.05, seed: Seed(10) };
    let report = run_certificate_campaign(&cfg, opts(0)).unwrap();
    let failed: Vec<_> = report.instances.iter().filter(|i| i.certificate.best_c == 1.0).collect();
    assert!(!failed.is_empty());
    for inst in failed {
        assert!(!inst.certified);
        assert!(inst.c_used.is_none() && inst.support_bound.is_none());
        assert_eq!(inst.violations(), 0);
    }
    assert_eq!(report.certified + report.not_certified, 20);
}

#[test]
fn unit_weight_sweep_matches_plain_threshold() {
    let cfg = SweepConfig::new(0.555, 0.01, 1.0, vec![1.0], 100, 60, Seed(11));
    let sweep = sweep_figure1(&cfg, opts(0)).unwrap();
    let p = &sweep.points[0];
    assert!(
        p.achieved_ci_low <= sweep.zeta_ci_high && p.achieved_ci_high >= sweep.zeta_ci_low,
        "achieved [{}, {}] vs zeta [{}, {}]",
        p.achieved_ci_low,
        p.achieved_ci_high,
        sweep.zeta_ci_low,
        sweep.zeta_ci_high
    );
    let json = serde_json::to_value(&sweep).unwrap();
    assert_eq!(json["delta"], 0.555);
    assert_eq!(json["eps"], 0.01);
    assert_eq!(json["schema_version"], 1);
}
