//! Browser bindings: each export takes plain numbers and returns a JSON
//! string, or throws a string describing the error.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use l1lab::certify::{recovery_error_bound, support_error_bound, RobustnessCertificate};
use l1lab::lab::experiments::linspace;
use l1lab::lab::{rho_trials, summarize, RhoConfig, RunOptions};
use l1lab::recover::{recover_l1, relative_l2_error, reweight_modified, SUCCESS_TOL};
use l1lab::sampling::sample_gaussian_matrix;
use l1lab::signals::generate_model_signal;
use l1lab::{Result, Seed};

const UNTIMED: RunOptions = RunOptions { workers: 1, record_timing: false };

fn finish(v: Result<Value>) -> std::result::Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Recovers one strong-plus-tail signal with plain ℓ1 and with the two-stage
/// algorithm (weight `w` off the selected set).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare_recovery(
    n: usize,
    m: usize,
    k_strong: usize,
    k_total: usize,
    tail: f64,
    w: f64,
    seed: u64,
) -> std::result::Result<String, JsValue> {
    finish((|| {
        let seed = Seed(seed);
        let a = sample_gaussian_matrix(m, n, seed.derive(0))?;
        let sig = generate_model_signal(n, k_strong, 1.0, tail, k_total, seed.derive(1))?;
        let y = a.mul_vec(&sig.x);
        let plain = recover_l1(&a, &y)?;
        let two = reweight_modified(&a, &y, k_strong, w)?;
        let e_plain = relative_l2_error(&plain.estimate, &sig.x);
        let e_two = relative_l2_error(&two.estimate, &sig.x);
        Ok(json!({
            "x": sig.x,
            "plain": { "estimate": plain.estimate, "rel_error": e_plain, "success": e_plain <= SUCCESS_TOL },
            "two_stage": {
                "estimate": two.estimate,
                "selected": two.selected_set,
                "rel_error": e_two,
                "success": e_two <= SUCCESS_TOL,
            },
        }))
    })())
}

/// Plain-ℓ1 success rate at `points` values of ρ in `[0.05, 0.95]`.
#[wasm_bindgen]
pub fn phase_curve(n: usize, delta: f64, trials: usize, points: usize, seed: u64) -> std::result::Result<String, JsValue> {
    finish((|| {
        let cfg = RhoConfig { delta, n, trials_per_point: trials, rho_grid: linspace(0.05, 0.95, points), seed: Seed(seed) };
        let pts = summarize(&cfg.rho_grid, &rho_trials(&cfg, UNTIMED)?);
        Ok(json!({ "points": pts }))
    })())
}

/// κ, best C and the resulting bounds on the strong set of a random signal.
#[wasm_bindgen]
pub fn certificate(n: usize, m: usize, k_strong: usize, tail: f64, seed: u64) -> std::result::Result<String, JsValue> {
    finish((|| {
        let seed = Seed(seed);
        let a = sample_gaussian_matrix(m, n, seed.derive(0))?;
        let k_total = if tail > 0.0 { (2 * k_strong).min(n) } else { k_strong };
        let sig = generate_model_signal(n, k_strong, 1.0, tail, k_total, seed.derive(1))?;
        let x_k: Vec<f64> = sig.strong_set.iter().map(|&i| sig.x[i]).collect();
        let cert = RobustnessCertificate::compute(&a, &sig.strong_set, &x_k)?;
        let bounds = if cert.is_certified() {
            let c = cert.usable_c();
            json!({
                "C": c,
                "support": support_error_bound(c, cert.kappa, 1.0, sig.tail_mass)?.value,
                "l1_error": recovery_error_bound(c, cert.kappa, sig.tail_mass)?,
            })
        } else {
            Value::Null
        };
        Ok(json!({
            "K": cert.set,
            "kappa": finite(cert.kappa),
            "best_C": finite(cert.best_c),
            "certified": cert.is_certified(),
            "tail_mass": sig.tail_mass,
            "bounds": bounds,
        }))
    })())
}
