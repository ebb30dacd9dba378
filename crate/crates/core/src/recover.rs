//! Recovery algorithms: plain ℓ1, the iteratively reweighted loop with
//! weights `1 / (|xᵢ| + ε')`, and the two-stage variant that reweights
//! once using the top entries of the first solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{l2_norm, max_abs, sub, DenseMatrix};
use crate::lp::{l1_minimize, weighted_l1_minimize, L1Solution};

pub use crate::lp::WeightVector;

/// Relative ℓ2 error at or below which a recovery counts as exact.
pub const SUCCESS_TOL: f64 = 1e-4;
/// Sup-norm change between iterates that stops the reweighting loop.
pub const CONVERGENCE_TOL: f64 = 1e-9;
pub const DEFAULT_EPS_PRIME: f64 = 0.1;
pub const DEFAULT_WEIGHT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    L1,
    Candes,
    Modified,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::L1 => "l1",
            Algorithm::Candes => "candes",
            Algorithm::Modified => "modified",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Algorithm::L1),
            "candes" => Ok(Algorithm::Candes),
            "modified" => Ok(Algorithm::Modified),
            other => Err(Error::Parse(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    /// One entry per weighted solve, in order; the last equals `estimate`.
    pub stage_estimates: Vec<Vec<f64>>,
    /// The set given weight 1 in the second stage (two-stage algorithm only).
    pub selected_set: Vec<usize>,
    /// `max |A estimate - y|`.
    pub residual: f64,
    /// Weighted objective of the final solve, under that solve's weights.
    pub objective: f64,
    pub weights: Vec<f64>,
    pub lp_iterations: usize,
}

impl RecoveryResult {
    fn from_single(sol: L1Solution, weights: Vec<f64>) -> Self {
        Self {
            stage_estimates: vec![sol.x.clone()],
            estimate: sol.x,
            selected_set: Vec::new(),
            residual: sol.residual,
            objective: sol.objective,
            weights,
            lp_iterations: sol.iterations,
        }
    }

    pub fn relative_error(&self, truth: &[f64]) -> f64 {
        relative_l2_error(&self.estimate, truth)
    }

    pub fn success_vs(&self, truth: &[f64], tol: f64) -> bool {
        self.relative_error(truth) <= tol
    }
}

/// `‖est - truth‖₂ / ‖truth‖₂`, or the absolute error when `truth = 0`.
pub fn relative_l2_error(est: &[f64], truth: &[f64]) -> f64 {
    let err = l2_norm(&sub(est, truth));
    let scale = l2_norm(truth);
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Indices of the `k` largest magnitudes, ties going to the smaller index.
/// Returned in increasing order.
pub fn select_top_k(v: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));
    let mut top = order[..k.min(v.len())].to_vec();
    top.sort_unstable();
    top
}

pub fn recover_l1(a: &DenseMatrix, y: &[f64]) -> Result<RecoveryResult> {
    let sol = l1_minimize(a, y)?;
    Ok(RecoveryResult::from_single(sol, vec![1.0; a.cols()]))
}

pub fn recover_weighted(a: &DenseMatrix, y: &[f64], w: &WeightVector) -> Result<RecoveryResult> {
    let sol = weighted_l1_minimize(a, y, w)?;
    Ok(RecoveryResult::from_single(sol, w.as_slice().to_vec()))
}

/// Iterative reweighting: unit weights first, then `wᵢ = 1 / (|xᵢ| + ε')`
/// from the previous iterate, for at most `t_max` reweighted solves.
/// Stops early once consecutive iterates agree to [`CONVERGENCE_TOL`].
pub fn reweight_candes(a: &DenseMatrix, y: &[f64], eps_prime: f64, t_max: usize) -> Result<RecoveryResult> {
    if !(eps_prime.is_finite() && eps_prime > 0.0) {
        return Err(Error::InvalidParameter(format!("eps' must be positive, got {eps_prime}")));
    }
    let first = l1_minimize(a, y)?;
    let mut lp_iterations = first.iterations;
    let mut weights = vec![1.0; a.cols()];
    let mut current = first;
    let mut stages = vec![current.x.clone()];
    for _ in 0..t_max {
        let w = reweight(&current.x, eps_prime)?;
        let next = weighted_l1_minimize(a, y, &w)?;
        lp_iterations += next.iterations;
        let change = max_abs(&sub(&next.x, &current.x));
        weights = w.into();
        stages.push(next.x.clone());
        current = next;
        if change <= CONVERGENCE_TOL {
            break;
        }
    }
    Ok(RecoveryResult {
        estimate: current.x,
        stage_estimates: stages,
        selected_set: Vec::new(),
        residual: current.residual,
        objective: current.objective,
        weights,
        lp_iterations,
    })
}

/// `wᵢ = 1 / (|xᵢ| + ε')`.
pub fn reweight(x: &[f64], eps_prime: f64) -> Result<WeightVector> {
    WeightVector::new(x.iter().map(|v| 1.0 / (v.abs() + eps_prime)).collect())
}

/// Two-stage reweighting: plain ℓ1, then weight 1 on the `k_strong` largest
/// entries of that solution and `big_weight` on the rest.
pub fn reweight_modified(a: &DenseMatrix, y: &[f64], k_strong: usize, big_weight: f64) -> Result<RecoveryResult> {
    let n = a.cols();
    if k_strong > n {
        return Err(Error::InvalidCounts(format!("k_strong {k_strong} exceeds n {n}")));
    }
    if !(big_weight.is_finite() && big_weight >= 1.0) {
        return Err(Error::InvalidParameter(format!("W must be at least 1, got {big_weight}")));
    }
    let first = l1_minimize(a, y)?;
    let selected = select_top_k(&first.x, k_strong);
    let w = WeightVector::two_level(n, &selected, 1.0, big_weight)?;
    let second = weighted_l1_minimize(a, y, &w)?;
    Ok(RecoveryResult {
        stage_estimates: vec![first.x, second.x.clone()],
        estimate: second.x,
        selected_set: selected,
        residual: second.residual,
        objective: second.objective,
        weights: w.into(),
        lp_iterations: first.iterations + second.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_gaussian_matrix, Seed};
    use crate::signals::sparse_gaussian_signal;

    #[test]
    fn top_k_examples() {
        assert_eq!(select_top_k(&[0.5, -2.0, 1.0], 2), vec![1, 2]);
        assert_eq!(select_top_k(&[1.0, -1.0, 0.0], 1), vec![0]);
        assert!(select_top_k(&[1.0, 2.0], 0).is_empty());
    }

    #[test]
    fn reweight_is_monotone_in_magnitude() {
        let w = reweight(&[0.0, -3.0, 1.0], 0.1).unwrap();
        let w = w.as_slice();
        assert!(w[1] < w[2] && w[2] < w[0]);
        assert_eq!(w[0], 10.0);
    }

    #[test]
    fn parameter_validation() {
        let a = sample_gaussian_matrix(3, 6, Seed(1)).unwrap();
        let y = vec![1.0, 0.0, 0.0];
        assert!(reweight_candes(&a, &y, 0.0, 2).is_err());
        assert!(reweight_modified(&a, &y, 7, 10.0).is_err());
        assert!(reweight_modified(&a, &y, 2, 0.5).is_err());
        assert_eq!("modified".parse::<Algorithm>().unwrap(), Algorithm::Modified);
        assert!("omp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn reductions_to_plain_l1() {
        let a = sample_gaussian_matrix(10, 20, Seed(4)).unwrap();
        let x = sparse_gaussian_signal(20, 6, Seed(5)).unwrap();
        let y = a.mul_vec(&x);
        let plain = recover_l1(&a, &y).unwrap();
        let c0 = reweight_candes(&a, &y, 0.1, 0).unwrap();
        let m1 = reweight_modified(&a, &y, 4, 1.0).unwrap();
        let tol = 1e-8 * plain.objective;
        assert!((c0.objective - plain.objective).abs() <= tol);
        assert!((m1.objective - plain.objective).abs() <= tol);
        assert_eq!(c0.stage_estimates.len(), 1);
        assert_eq!(m1.stage_estimates.len(), 2);
    }

    #[test]
    fn exact_first_stage_stays_exact() {
        let a = sample_gaussian_matrix(20, 40, Seed(8)).unwrap();
        let x = sparse_gaussian_signal(40, 3, Seed(9)).unwrap();
        let y = a.mul_vec(&x);
        let r = reweight_candes(&a, &y, 0.1, 4).unwrap();
        assert!(relative_l2_error(&r.stage_estimates[0], &x) < 1e-9);
        for stage in &r.stage_estimates {
            assert!(max_abs(&sub(stage, &x)) <= 1e-6);
        }
    }
}
