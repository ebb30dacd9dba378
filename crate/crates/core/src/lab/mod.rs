//! Monte Carlo harness: seeded trials, threshold estimation, the
//! sparsity-factor sweep for the two-stage algorithm, and certificate
//! campaigns, together with their flat-file formats.

pub mod campaign;
pub mod experiments;
pub mod io;
pub mod stats;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{l1_norm, sub, DenseMatrix};
use crate::recover::{
    recover_l1, recover_weighted, relative_l2_error, reweight_modified, Algorithm, RecoveryResult, WeightVector, SUCCESS_TOL,
};
use crate::sampling::Seed;

pub use campaign::{run_certificate_campaign, CampaignConfig, CampaignInstance, CampaignReport};
pub use experiments::{
    estimate_delta_c, estimate_rho_f, rho_trials, summarize, sweep_figure1, CurvePoint, DeltaCConfig, RhoConfig, SweepConfig, SweepCurve,
    SweepPoint, ThresholdCurve,
};

/// Version stamped into every JSON object written by the harness.
pub const SCHEMA_VERSION: u32 = 1;

/// Execution settings that never change results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `0` uses all available cores.
    pub workers: usize,
    /// When false, `runtime_ms` is written as 0 so trial logs are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: 0, record_timing: true }
    }
}

/// One row of a trial log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub algo: Algorithm,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub k_strong: usize,
    pub k_total: usize,
    pub a1: Option<f64>,
    pub tail_mass: Option<f64>,
    #[serde(rename = "W")]
    pub w: f64,
    pub success: bool,
    pub rel_l2_error: f64,
    pub l1_error: f64,
    pub runtime_ms: f64,
}

impl TrialRecord {
    /// Whether `success` agrees with the stored relative error.
    pub fn is_consistent(&self) -> bool {
        self.success == (self.rel_l2_error <= SUCCESS_TOL)
    }
}

/// What a single trial runs on `(A, y = A x)`.
#[derive(Debug, Clone)]
pub(crate) enum TrialAlgorithm {
    L1,
    Weighted(WeightVector, f64),
    Modified { k_strong: usize, w: f64 },
}

/// Signal description copied into the trial log.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SignalSummary {
    pub k_strong: usize,
    pub k_total: usize,
    pub a1: Option<f64>,
    pub tail_mass: Option<f64>,
}

pub(crate) fn run_trial(
    trial_id: u64,
    seed: Seed,
    a: &DenseMatrix,
    x: &[f64],
    algorithm: &TrialAlgorithm,
    signal: SignalSummary,
    opts: RunOptions,
) -> Result<TrialRecord> {
    let y = a.mul_vec(x);
    // Clock reads are skipped when untimed; some targets have no clock.
    let start = opts.record_timing.then(Instant::now);
    let (algo, w, result): (Algorithm, f64, Result<RecoveryResult>) = match algorithm {
        TrialAlgorithm::L1 => (Algorithm::L1, 1.0, recover_l1(a, &y)),
        TrialAlgorithm::Weighted(weights, ratio) => (Algorithm::L1, *ratio, recover_weighted(a, &y, weights)),
        TrialAlgorithm::Modified { k_strong, w } => (Algorithm::Modified, *w, reweight_modified(a, &y, *k_strong, *w)),
    };
    let runtime_ms = start.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3);
    let (rel_l2_error, l1_error) = match result {
        Ok(r) => (relative_l2_error(&r.estimate, x), l1_norm(&sub(&r.estimate, x))),
        // A solve that misses its accuracy target counts as a failed recovery.
        Err(Error::Inaccurate { .. }) | Err(Error::IterationLimit(_)) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    Ok(TrialRecord {
        trial_id,
        seed: seed.0,
        algo,
        n: a.cols(),
        m: a.rows(),
        delta: a.rows() as f64 / a.cols() as f64,
        k_strong: signal.k_strong,
        k_total: signal.k_total,
        a1: signal.a1,
        tail_mass: signal.tail_mass,
        w,
        success: rel_l2_error <= SUCCESS_TOL,
        rel_l2_error,
        l1_error,
        runtime_ms,
    })
}

/// Evaluates `f(0), ..., f(count - 1)` on `workers` threads; results keep index order.
pub fn map_indexed<T, F>(count: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers != 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        return pool.install(|| (0..count).into_par_iter().map(&f).collect());
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    (0..count).map(f).collect()
}

/// Number of rows (or entries) for a ratio of `n`, robust to `0.555 * 200 = 110.99...`.
pub(crate) fn fraction_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 1e-9).floor() as usize
}
