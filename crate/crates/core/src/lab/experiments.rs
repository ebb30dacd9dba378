use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stats::{fit_logistic, isotonic, wilson_interval, LogisticFit};
use super::{fraction_count, map_indexed, run_trial, RunOptions, SignalSummary, TrialAlgorithm, TrialRecord, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::recover::WeightVector;
use crate::sampling::{sample_gaussian_matrix, Seed};
use crate::signals::{generate_model_signal, generate_nonuniform_signal, sparse_gaussian_signal, AmplitudeLaw};

/// Success summary at one axis value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub axis: f64,
    pub successes: usize,
    pub n_trials: usize,
    pub p_success: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CurvePoint {
    fn from_trials(axis: f64, trials: &[TrialRecord]) -> Self {
        let successes = trials.iter().filter(|t| t.success).count();
        let n_trials = trials.len();
        let (ci_low, ci_high) = wilson_interval(successes, n_trials);
        let p_success = if n_trials == 0 { 0.0 } else { successes as f64 / n_trials as f64 };
        Self { axis, successes, n_trials, p_success, ci_low, ci_high }
    }
}

/// Success probability against one swept parameter, with a logistic fit
/// whose midpoint locates the transition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub schema_version: u32,
    pub axis_name: String,
    pub parameters: serde_json::Value,
    pub points: Vec<CurvePoint>,
    /// Monotone least-squares smoothing of `p_success`, weighted by trials.
    pub isotonic: Vec<f64>,
    pub fit: LogisticFit,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl ThresholdCurve {
    fn assemble(
        axis_name: &str,
        parameters: serde_json::Value,
        axis: &[f64],
        trials: Vec<TrialRecord>,
        increasing: bool,
    ) -> Result<Self> {
        let points = summarize(axis, &trials);
        let probs: Vec<f64> = points.iter().map(|p| p.p_success).collect();
        let weights: Vec<f64> = points.iter().map(|p| p.n_trials as f64).collect();
        let isotonic = isotonic(&probs, &weights, increasing);
        let fit = fit_points(&points)?;
        Ok(Self { schema_version: SCHEMA_VERSION, axis_name: axis_name.into(), parameters, points, isotonic, fit, trials })
    }

    pub fn midpoint(&self) -> f64 {
        self.fit.midpoint
    }
}

fn fit_points(points: &[CurvePoint]) -> Result<LogisticFit> {
    let xs: Vec<f64> = points.iter().map(|p| p.axis).collect();
    let s: Vec<usize> = points.iter().map(|p| p.successes).collect();
    let t: Vec<usize> = points.iter().map(|p| p.n_trials).collect();
    fit_logistic(&xs, &s, &t)
}

fn check_grid(name: &str, grid: &[f64], lo_open: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    for &v in grid {
        let ok = if lo_open { v > 0.0 && v <= 1.0 } else { (0.0..=1.0).contains(&v) };
        if !ok {
            return Err(Error::InvalidFraction(format!("{name} grid value {v} out of range")));
        }
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial per point is required".into()));
    }
    Ok(())
}

/// Rows for undersampling ratio `delta`, which must give `1 <= m < n`.
fn measurement_count(delta: f64, n: usize) -> Result<usize> {
    let m = fraction_count(delta, n);
    if !(delta > 0.0 && delta < 1.0) || m == 0 || m >= n {
        return Err(Error::InvalidFraction(format!("delta = {delta} gives {m} rows for n = {n}")));
    }
    Ok(m)
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoConfig {
    pub delta: f64,
    pub n: usize,
    pub trials_per_point: usize,
    pub rho_grid: Vec<f64>,
    pub seed: Seed,
}

impl RhoConfig {
    /// Eleven points on `[0.1, 0.6]`, bracketing the plain-ℓ1 transition for moderate δ.
    pub fn default_grid() -> Vec<f64> {
        linspace(0.1, 0.6, 11)
    }
}

/// Runs the plain-ℓ1 trials behind [`estimate_rho_f`] without fitting;
/// trials for grid point `i` occupy `i * trials_per_point ..`.
pub fn rho_trials(cfg: &RhoConfig, opts: RunOptions) -> Result<Vec<TrialRecord>> {
    let m = measurement_count(cfg.delta, cfg.n)?;
    check_grid("rho", &cfg.rho_grid, true)?;
    check_trials(cfg.trials_per_point)?;
    let per = cfg.trials_per_point;
    let n = cfg.n;
    map_indexed(cfg.rho_grid.len() * per, opts.workers, |id| {
        let rho = cfg.rho_grid[id / per];
        let k = fraction_count(rho * cfg.delta, n).min(n);
        let seed = cfg.seed.derive(id as u64);
        let a = sample_gaussian_matrix(m, n, seed.derive(0))?;
        let x = sparse_gaussian_signal(n, k, seed.derive(1))?;
        let summary = SignalSummary { k_strong: k, k_total: k, a1: None, tail_mass: None };
        run_trial(id as u64, seed, &a, &x, &TrialAlgorithm::L1, summary, opts)
    })
}

/// Per-point success summaries for trials laid out as in [`rho_trials`].
pub fn summarize(axis: &[f64], trials: &[TrialRecord]) -> Vec<CurvePoint> {
    let per = trials.len() / axis.len().max(1);
    axis.iter().enumerate().map(|(i, &v)| CurvePoint::from_trials(v, &trials[i * per..(i + 1) * per])).collect()
}

/// Plain-ℓ1 success against `ρ = k/m` for `k`-sparse Gaussian signals; the
/// fitted 50% point is the empirical weak threshold.
pub fn estimate_rho_f(cfg: &RhoConfig, opts: RunOptions) -> Result<ThresholdCurve> {
    let trials = rho_trials(cfg, opts)?;
    let params = serde_json::json!({
        "experiment": "rho_f",
        "delta": cfg.delta,
        "n": cfg.n,
        "m": measurement_count(cfg.delta, cfg.n)?,
        "trials_per_point": cfg.trials_per_point,
        "seed": cfg.seed.0,
    });
    ThresholdCurve::assemble("rho", params, &cfg.rho_grid, trials, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCConfig {
    pub gamma1: f64,
    pub p1: f64,
    pub p2: f64,
    pub weight_ratio: f64,
    pub n: usize,
    pub trials_per_point: usize,
    pub delta_grid: Vec<f64>,
    pub seed: Seed,
}

/// Weighted-ℓ1 success against δ for two-class signals, with weight 1 on
/// class 1 and `weight_ratio` on class 2; the fitted 50% point estimates δ_c.
pub fn estimate_delta_c(cfg: &DeltaCConfig, opts: RunOptions) -> Result<ThresholdCurve> {
    for (name, v) in [("gamma1", cfg.gamma1), ("p1", cfg.p1), ("p2", cfg.p2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidFraction(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    if !(cfg.weight_ratio.is_finite() && cfg.weight_ratio >= 1.0) {
        return Err(Error::InvalidParameter(format!("weight ratio must be at least 1, got {}", cfg.weight_ratio)));
    }
    check_grid("delta", &cfg.delta_grid, true)?;
    check_trials(cfg.trials_per_point)?;
    let ms: Vec<usize> = cfg.delta_grid.iter().map(|&d| measurement_count(d, cfg.n)).collect::<Result<_>>()?;
    let per = cfg.trials_per_point;
    let n = cfg.n;
    let trials = map_indexed(cfg.delta_grid.len() * per, opts.workers, |id| {
        let m = ms[id / per];
        let seed = cfg.seed.derive(id as u64);
        let a = sample_gaussian_matrix(m, n, seed.derive(0))?;
        let sig = generate_nonuniform_signal(n, cfg.gamma1, cfg.p1, cfg.p2, AmplitudeLaw::Gaussian, seed.derive(1))?;
        let weights = WeightVector::two_level(n, &sig.class1, 1.0, cfg.weight_ratio)?;
        let support = sig.support();
        let in_class1 = support.iter().filter(|i| sig.class1.binary_search(i).is_ok()).count();
        let summary = SignalSummary { k_strong: in_class1, k_total: support.len(), a1: None, tail_mass: None };
        let algo = TrialAlgorithm::Weighted(weights, cfg.weight_ratio);
        run_trial(id as u64, seed, &a, &sig.x, &algo, summary, opts)
    })?;
    let params = serde_json::json!({
        "experiment": "delta_c",
        "gamma1": cfg.gamma1,
        "p1": cfg.p1,
        "p2": cfg.p2,
        "weight_ratio": cfg.weight_ratio,
        "n": n,
        "trials_per_point": per,
        "seed": cfg.seed.0,
    });
    ThresholdCurve::assemble("delta", params, &cfg.delta_grid, trials, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub delta: f64,
    pub eps: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub p1_grid: Vec<f64>,
    pub n: usize,
    pub trials_per_point: usize,
    pub seed: Seed,
    /// Plain-ℓ1 threshold to use instead of estimating it.
    pub rho_f: Option<f64>,
    pub rho_grid: Vec<f64>,
    /// Floor of the strong amplitudes.
    pub a1: f64,
    /// ℓ1 mass spread over the second-block nonzeros.
    pub tail_mass: f64,
    /// Bisection steps on P₂ after the two bracketing probes.
    pub bisection_steps: usize,
}

impl SweepConfig {
    pub fn new(delta: f64, eps: f64, w: f64, p1_grid: Vec<f64>, n: usize, trials_per_point: usize, seed: Seed) -> Self {
        Self {
            delta,
            eps,
            w,
            p1_grid,
            n,
            trials_per_point,
            seed,
            rho_f: None,
            rho_grid: RhoConfig::default_grid(),
            a1: 1.0,
            tail_mass: 0.01,
            bisection_steps: 7,
        }
    }
}

/// Largest recoverable second-block density at one first-block density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p1: f64,
    pub p2: f64,
    pub p2_ci_low: f64,
    pub p2_ci_high: f64,
    /// `P₁ γ₁ + P₂ γ₂`.
    pub achieved: f64,
    pub achieved_ci_low: f64,
    pub achieved_ci_high: f64,
    /// `logistic` when located by a fit over all probes, otherwise `bisection`.
    pub method: String,
    pub fit: Option<LogisticFit>,
    pub probes: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCurve {
    pub schema_version: u32,
    pub delta: f64,
    pub eps: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub n: usize,
    pub m: usize,
    pub trials_per_point: usize,
    pub seed: Seed,
    pub a1: f64,
    pub tail_mass: f64,
    pub rho_f: f64,
    pub rho_f_ci_low: f64,
    pub rho_f_ci_high: f64,
    /// `estimated` or `supplied`.
    pub rho_f_source: String,
    /// Plain-ℓ1 sparsity factor `ρ_F δ` and its interval.
    pub zeta_hat: f64,
    pub zeta_ci_low: f64,
    pub zeta_ci_high: f64,
    pub k_strong: usize,
    pub gamma1: f64,
    pub points: Vec<SweepPoint>,
    pub rho_curve: Option<ThresholdCurve>,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

/// Two-stage threshold sweep: for each P₁, the largest P₂ at which the two-stage
/// algorithm succeeds half the time, converted to an average sparsity
/// factor and compared with the plain-ℓ1 factor `ρ̂_F δ`.
///
/// Block 1 has `k_strong = ⌊(1-ε) ρ̂_F δ n⌋` slots, each independently a
/// strong entry with probability P₁; each of the other `n - k_strong` slots is
/// independently a small nonzero with probability P₂, the small nonzeros
/// sharing `tail_mass` equally.
pub fn sweep_figure1(cfg: &SweepConfig, opts: RunOptions) -> Result<SweepCurve> {
    let n = cfg.n;
    let m = measurement_count(cfg.delta, n)?;
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(Error::InvalidFraction(format!("eps = {} must lie in (0, 1)", cfg.eps)));
    }
    if !(cfg.w.is_finite() && cfg.w >= 1.0) {
        return Err(Error::InvalidParameter(format!("W must be at least 1, got {}", cfg.w)));
    }
    check_grid("p1", &cfg.p1_grid, false)?;
    check_trials(cfg.trials_per_point)?;
    if !(cfg.a1 > 0.0 && cfg.tail_mass > 0.0) {
        return Err(Error::InvalidParameter("a1 and tail mass must be positive".into()));
    }

    let (rho_f, rho_lo, rho_hi, source, rho_curve) = match cfg.rho_f {
        Some(r) => {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::InvalidFraction(format!("rho_F = {r} out of range")));
            }
            (r, r, r, "supplied", None)
        }
        None => {
            let rc = RhoConfig {
                delta: cfg.delta,
                n,
                trials_per_point: cfg.trials_per_point,
                rho_grid: cfg.rho_grid.clone(),
                seed: cfg.seed.derive(u64::MAX),
            };
            let curve = estimate_rho_f(&rc, opts)?;
            let f = curve.fit;
            (f.midpoint, f.midpoint_ci_low, f.midpoint_ci_high, "estimated", Some(curve))
        }
    };
    let k_strong = fraction_count((1.0 - cfg.eps) * rho_f * cfg.delta, n);
    if k_strong == 0 || k_strong >= m {
        return Err(Error::InvalidCounts(format!("first block size {k_strong} unusable with {m} rows")));
    }
    let gamma1 = k_strong as f64 / n as f64;
    let gamma2 = 1.0 - gamma1;
    let per = cfg.trials_per_point;
    let max_probes = cfg.bisection_steps + 2;

    let mut points = Vec::with_capacity(cfg.p1_grid.len());
    let mut all_trials = Vec::new();
    for (j, &p1) in cfg.p1_grid.iter().enumerate() {
        let point_seed = cfg.seed.derive(j as u64);
        let mut probe_index = 0usize;
        let mut probes: Vec<CurvePoint> = Vec::new();
        let mut run_probe = |p2: f64, probes: &mut Vec<CurvePoint>, all: &mut Vec<TrialRecord>| -> Result<f64> {
            let base = (j * max_probes + probe_index) * per;
            let probe_seed = point_seed.derive(probe_index as u64);
            probe_index += 1;
            let trials = map_indexed(per, opts.workers, |t| {
                let seed = probe_seed.derive(t as u64);
                sweep_trial((base + t) as u64, seed, m, k_strong, p1, p2, cfg, opts)
            })?;
            let point = CurvePoint::from_trials(p2, &trials);
            let p = point.p_success;
            probes.push(point);
            all.extend(trials);
            Ok(p)
        };

        // Dense enough that a successful recovery is implausible.
        let cap = ((m as f64 - p1 * k_strong as f64) / (n - k_strong) as f64).clamp(0.0, 1.0);
        let at_zero = run_probe(0.0, &mut probes, &mut all_trials)?;
        let point = if at_zero < 0.5 {
            SweepPoint::bracketed(p1, 0.0, 0.0, 0.0, gamma1, gamma2, probes)
        } else {
            let (mut lo, mut hi) = (0.0, cap);
            if run_probe(cap, &mut probes, &mut all_trials)? >= 0.5 {
                lo = cap;
                hi = cap;
            }
            for _ in 0..cfg.bisection_steps {
                if hi - lo <= 0.0 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if run_probe(mid, &mut probes, &mut all_trials)? >= 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            match fit_points(&probes) {
                Ok(fit) if fit.slope < 0.0 && fit.midpoint >= 0.0 && fit.midpoint <= cap.max(lo) => {
                    let mut p = SweepPoint::bracketed(
                        p1,
                        fit.midpoint,
                        fit.midpoint_ci_low.max(0.0),
                        fit.midpoint_ci_high.min(1.0),
                        gamma1,
                        gamma2,
                        probes,
                    );
                    p.method = "logistic".into();
                    p.fit = Some(fit);
                    p
                }
                _ => SweepPoint::bracketed(p1, 0.5 * (lo + hi), lo, hi, gamma1, gamma2, probes),
            }
        };
        points.push(point);
    }

    Ok(SweepCurve {
        schema_version: SCHEMA_VERSION,
        delta: cfg.delta,
        eps: cfg.eps,
        w: cfg.w,
        n,
        m,
        trials_per_point: per,
        seed: cfg.seed,
        a1: cfg.a1,
        tail_mass: cfg.tail_mass,
        rho_f,
        rho_f_ci_low: rho_lo,
        rho_f_ci_high: rho_hi,
        rho_f_source: source.into(),
        zeta_hat: rho_f * cfg.delta,
        zeta_ci_low: rho_lo * cfg.delta,
        zeta_ci_high: rho_hi * cfg.delta,
        k_strong,
        gamma1,
        points,
        rho_curve,
        trials: all_trials,
    })
}

impl SweepPoint {
    fn bracketed(p1: f64, p2: f64, lo: f64, hi: f64, gamma1: f64, gamma2: f64, probes: Vec<CurvePoint>) -> Self {
        let base = p1 * gamma1;
        Self {
            p1,
            p2,
            p2_ci_low: lo,
            p2_ci_high: hi,
            achieved: base + p2 * gamma2,
            achieved_ci_low: base + lo * gamma2,
            achieved_ci_high: base + hi * gamma2,
            method: "bisection".into(),
            fit: None,
            probes,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_trial(
    trial_id: u64,
    seed: Seed,
    m: usize,
    k_strong: usize,
    p1: f64,
    p2: f64,
    cfg: &SweepConfig,
    opts: RunOptions,
) -> Result<TrialRecord> {
    let n = cfg.n;
    let mut rng = seed.derive(0).rng();
    let strong = (0..k_strong).filter(|_| rng.random::<f64>() < p1).count();
    let tail = (0..n - k_strong).filter(|_| rng.random::<f64>() < p2).count();
    let a = sample_gaussian_matrix(m, n, seed.derive(1))?;
    let sig = generate_model_signal(n, strong, cfg.a1, cfg.tail_mass, strong + tail, seed.derive(2))?;
    let summary = SignalSummary {
        k_strong: strong,
        k_total: strong + tail,
        a1: Some(cfg.a1),
        tail_mass: Some(sig.tail_mass),
    };
    let algo = TrialAlgorithm::Modified { k_strong, w: cfg.w };
    run_trial(trial_id, seed, &a, &sig.x, &algo, summary, opts)
}
