//! Binomial summaries: Wilson intervals, two-parameter logistic fits by
//! iteratively reweighted least squares, and isotonic smoothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// A fit is degenerate when its residual deviance is at least this
/// fraction of the intercept-only deviance.
pub const DEGENERATE_DEVIANCE_RATIO: f64 = 0.25;
const IRLS_MAX_ITER: usize = 100;
const IRLS_TOL: f64 = 1e-10;
/// Slopes beyond this indicate (quasi-)separated data with no finite MLE.
const MAX_ABS_SLOPE_SCALE: f64 = 1e4;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so the interval always contains p despite rounding at 0 and 1.
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    /// Axis value where the fitted success probability is 1/2.
    pub midpoint: f64,
    pub midpoint_ci_low: f64,
    pub midpoint_ci_high: f64,
    pub residual_deviance: f64,
    pub null_deviance: f64,
    pub iterations: usize,
}

impl LogisticFit {
    pub fn probability(&self, x: f64) -> f64 {
        sigmoid(self.intercept + self.slope * x)
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Binomial deviance contribution `2 [s ln(s/μ) + f ln(f/(n-μ))]`.
fn deviance_term(successes: f64, trials: f64, p: f64) -> f64 {
    let mu = trials * p;
    let failures = trials - successes;
    let mut d = 0.0;
    if successes > 0.0 {
        d += successes * (successes / mu).ln();
    }
    if failures > 0.0 {
        d += failures * (failures / (trials - mu)).ln();
    }
    2.0 * d
}

/// Maximum-likelihood fit of `logit p = b₀ + b₁ x` to binomial counts, with a
/// delta-method 95% interval on the midpoint `-b₀/b₁`.
///
/// Fails with `DegenerateFit` when the success rate is constant, the data
/// are separated, or the residual deviance is at least
/// [`DEGENERATE_DEVIANCE_RATIO`] of the null deviance.
pub fn fit_logistic(xs: &[f64], successes: &[usize], trials: &[usize]) -> Result<LogisticFit> {
    if xs.len() != successes.len() || xs.len() != trials.len() {
        return Err(Error::InvalidDimensions("fit inputs differ in length".into()));
    }
    if successes.iter().zip(trials).any(|(s, t)| s > t) {
        return Err(Error::InvalidCounts("more successes than trials".into()));
    }
    let total_n: usize = trials.iter().sum();
    let total_s: usize = successes.iter().sum();
    if total_n == 0 || total_s == 0 || total_s == total_n {
        return Err(Error::DegenerateFit("success rate is constant".into()));
    }
    let distinct = xs.iter().zip(trials).filter(|(_, &t)| t > 0).map(|(x, _)| *x);
    let (lo, hi) = distinct.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        return Err(Error::DegenerateFit("fewer than two distinct axis values".into()));
    }
    let span = hi - lo;

    let pbar = total_s as f64 / total_n as f64;
    let null_deviance: f64 = successes
        .iter()
        .zip(trials)
        .map(|(&s, &t)| deviance_term(s as f64, t as f64, pbar))
        .sum();

    // Fit on the standardized axis u = (x - lo) / span for conditioning.
    let us: Vec<f64> = xs.iter().map(|x| (x - lo) / span).collect();
    let (mut b0, mut b1) = ((pbar / (1.0 - pbar)).ln(), 0.0);
    let mut info = [[0.0; 2]; 2];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=IRLS_MAX_ITER {
        iterations = it;
        let (mut g0, mut g1) = (0.0, 0.0);
        info = [[0.0; 2]; 2];
        for ((&u, &s), &t) in us.iter().zip(successes).zip(trials) {
            if t == 0 {
                continue;
            }
            let p = sigmoid(b0 + b1 * u);
            let w = t as f64 * p * (1.0 - p);
            let r = s as f64 - t as f64 * p;
            g0 += r;
            g1 += r * u;
            info[0][0] += w;
            info[0][1] += w * u;
            info[1][1] += w * u * u;
        }
        info[1][0] = info[0][1];
        let det = info[0][0] * info[1][1] - info[0][1] * info[0][1];
        if !(det > 0.0) || !det.is_finite() {
            break;
        }
        let d0 = (info[1][1] * g0 - info[0][1] * g1) / det;
        let d1 = (info[0][0] * g1 - info[0][1] * g0) / det;
        b0 += d0;
        b1 += d1;
        if b1.abs() > MAX_ABS_SLOPE_SCALE {
            break;
        }
        if d0.abs().max(d1.abs()) < IRLS_TOL * (1.0 + b0.abs().max(b1.abs())) {
            converged = true;
            break;
        }
    }
    if !converged || b1 == 0.0 {
        return Err(Error::DegenerateFit("logistic likelihood has no finite maximum".into()));
    }

    let residual_deviance: f64 = us
        .iter()
        .zip(successes)
        .zip(trials)
        .filter(|(_, &t)| t > 0)
        .map(|((&u, &s), &t)| deviance_term(s as f64, t as f64, sigmoid(b0 + b1 * u)))
        .sum();
    if residual_deviance >= DEGENERATE_DEVIANCE_RATIO * null_deviance {
        return Err(Error::DegenerateFit(format!(
            "residual deviance {residual_deviance:.3} against null deviance {null_deviance:.3}"
        )));
    }

    // Covariance of (b0, b1) is the inverse information; midpoint u* = -b0/b1.
    let det = info[0][0] * info[1][1] - info[0][1] * info[0][1];
    let cov = [[info[1][1] / det, -info[0][1] / det], [-info[0][1] / det, info[0][0] / det]];
    let u_mid = -b0 / b1;
    let grad = [-1.0 / b1, b0 / (b1 * b1)];
    let var = grad[0] * grad[0] * cov[0][0] + 2.0 * grad[0] * grad[1] * cov[0][1] + grad[1] * grad[1] * cov[1][1];
    let half = Z95 * var.max(0.0).sqrt() * span;
    let midpoint = lo + span * u_mid;
    Ok(LogisticFit {
        intercept: b0 - b1 * lo / span,
        slope: b1 / span,
        midpoint,
        midpoint_ci_low: midpoint - half,
        midpoint_ci_high: midpoint + half,
        residual_deviance,
        null_deviance,
        iterations,
    })
}

/// Weighted least-squares fit of a monotone sequence by pool-adjacent-violators.
pub fn isotonic(values: &[f64], weights: &[f64], increasing: bool) -> Vec<f64> {
    let sign = if increasing { 1.0 } else { -1.0 };
    // Blocks of (mean, weight, length) over sign-adjusted values.
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((sign * v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            let m = if w > 0.0 { (m1 * w1 + m2 * w2) / w } else { 0.5 * (m1 + m2) };
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat_n(sign * m, l)).collect()
}
