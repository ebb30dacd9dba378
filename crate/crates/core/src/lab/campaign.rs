use serde::{Deserialize, Serialize};

use super::{map_indexed, RunOptions, SCHEMA_VERSION};
use crate::certify::{recovery_error_bound, support_error_bound, RobustnessCertificate};
use crate::error::{Error, Result};
use crate::linalg::{complement, l1_norm, sub};
use crate::lp::l1_minimize;
use crate::recover::select_top_k;
use crate::sampling::{sample_gaussian_matrix, Seed};
use crate::signals::generate_model_signal;

/// Slack allowed on every bound comparison.
pub const BOUND_SLACK: f64 = 1e-6;
/// Largest n accepted, keeping the exact κ enumeration affordable.
pub const MAX_CAMPAIGN_N: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n: usize,
    pub m: usize,
    pub instances: usize,
    pub k_strong: usize,
    pub k_total: usize,
    pub a1: f64,
    /// Tail mass Δ of each generated signal.
    pub delta: f64,
    pub seed: Seed,
}

impl CampaignConfig {
    /// `n = 40, m = 24, |K| = 6`, six tail entries carrying `Δ = 0.05`, `a₁ = 1`.
    pub fn standard(instances: usize, seed: Seed) -> Self {
        Self { n: 40, m: 24, instances, k_strong: 6, k_total: 12, a1: 1.0, delta: 0.05, seed }
    }
}

/// Certificate and bound checks for one generated `(A, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignInstance {
    pub instance_id: usize,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    #[serde(flatten)]
    pub certificate: RobustnessCertificate,
    /// `best_C > 1 + resolution` and κ finite; only these are checked.
    pub certified: bool,
    pub tail_mass: f64,
    /// C used in the bounds: `best_C`, or the bisection ceiling when unbounded.
    pub c_used: Option<f64>,
    pub support_bound: Option<f64>,
    pub error_bound: Option<f64>,
    /// `|K' \ supp(x)|` for the top-|K| selection from the stage-1 solution.
    pub outside_support: usize,
    /// `‖x - x̂‖₁` of the stage-1 solution.
    pub l1_error: f64,
    /// `‖(x - x̂)_K̄‖₁` and `‖x_K‖₁ - ‖x̂_K‖₁`.
    pub off_set_error: f64,
    pub on_set_loss: f64,
    pub support_ok: bool,
    pub error_ok: bool,
    pub robustness_ok: bool,
}

impl CampaignInstance {
    pub fn violations(&self) -> usize {
        [self.support_ok, self.error_ok, self.robustness_ok].iter().filter(|ok| !**ok).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub config: CampaignConfig,
    pub certified: usize,
    pub not_certified: usize,
    pub violations: usize,
    pub instances: Vec<CampaignInstance>,
}

/// For each instance: draw `A` and a model signal, certify `(A, K, x_K)` on
/// the strong set, solve plain ℓ1, and compare the stage-1 support and
/// error against the certified bounds.
pub fn run_certificate_campaign(cfg: &CampaignConfig, opts: RunOptions) -> Result<CampaignReport> {
    if cfg.n > MAX_CAMPAIGN_N {
        return Err(Error::InvalidParameter(format!("campaigns support n <= {MAX_CAMPAIGN_N}, got {}", cfg.n)));
    }
    if cfg.m == 0 || cfg.m >= cfg.n {
        return Err(Error::InvalidDimensions(format!("need 1 <= m < n, got m = {}, n = {}", cfg.m, cfg.n)));
    }
    let instances = map_indexed(cfg.instances, opts.workers, |i| campaign_instance(cfg, i))?;
    let certified = instances.iter().filter(|r| r.certified).count();
    let violations = instances.iter().map(CampaignInstance::violations).sum();
    Ok(CampaignReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        certified,
        not_certified: instances.len() - certified,
        violations,
        instances,
    })
}

fn campaign_instance(cfg: &CampaignConfig, i: usize) -> Result<CampaignInstance> {
    let seed = cfg.seed.derive(i as u64);
    let a = sample_gaussian_matrix(cfg.m, cfg.n, seed.derive(0))?;
    let sig = generate_model_signal(cfg.n, cfg.k_strong, cfg.a1, cfg.delta, cfg.k_total, seed.derive(1))?;
    let set = &sig.strong_set;
    let x_k: Vec<f64> = set.iter().map(|&j| sig.x[j]).collect();
    let certificate = RobustnessCertificate::compute(&a, set, &x_k)?;
    let certified = certificate.is_certified();

    let est = l1_minimize(&a, &a.mul_vec(&sig.x))?.x;
    let selected = select_top_k(&est, cfg.k_strong);
    let outside_support = selected.iter().filter(|j| sig.support.binary_search(j).is_err()).count();
    let l1_error = l1_norm(&sub(&est, &sig.x));
    let rest = complement(set, cfg.n);
    let off_set_error: f64 = rest.iter().map(|&j| (sig.x[j] - est[j]).abs()).sum();
    let on_set_loss = l1_norm(&x_k) - set.iter().map(|&j| est[j].abs()).sum::<f64>();

    let mut inst = CampaignInstance {
        instance_id: i,
        seed: seed.0,
        m: cfg.m,
        n: cfg.n,
        certificate,
        certified,
        tail_mass: sig.tail_mass,
        c_used: None,
        support_bound: None,
        error_bound: None,
        outside_support,
        l1_error,
        off_set_error,
        on_set_loss,
        support_ok: true,
        error_ok: true,
        robustness_ok: true,
    };
    if certified {
        let c = inst.certificate.usable_c();
        let kappa = inst.certificate.kappa;
        let sb = support_error_bound(c, kappa, cfg.a1, sig.tail_mass)?.value;
        let eb = recovery_error_bound(c, kappa, sig.tail_mass)?;
        inst.c_used = Some(c);
        inst.support_bound = Some(sb);
        inst.error_bound = Some(eb);
        inst.support_ok = outside_support as f64 <= sb + BOUND_SLACK;
        inst.error_ok = l1_error <= eb + BOUND_SLACK;
        let ratio = c / (c - 1.0);
        inst.robustness_ok = off_set_error <= 2.0 * ratio * sig.tail_mass + BOUND_SLACK
            && on_set_loss <= 2.0 / (c - 1.0) * sig.tail_mass + BOUND_SLACK;
    }
    Ok(inst)
}
