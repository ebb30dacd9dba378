//! Null-space certificates for a concrete matrix and index set: the balance
//! constant κ, the weak-robustness check for a given C and its largest
//! admissible C, and the support/error bounds that follow from them.
//!
//! Every quantity here is the optimum of a small LP over `{w : A w = 0}`,
//! written directly in terms of `A` with the split `w = u - v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complement, ensure_full_row_rank, l1_norm, DenseMatrix};
use crate::lp::{solve_lp, LpProblem, LpStatus};

/// Largest `|K|` accepted by the sign-enumeration κ computation.
pub const MAX_EXACT_SET: usize = 16;
/// Tolerance on the minimum of the robustness objective.
pub const ROBUSTNESS_TOL: f64 = 1e-8;
/// Absolute resolution of the best-C bisection.
pub const BEST_C_RESOLUTION: f64 = 1e-3;
/// Bisection ceiling; holding here is reported as `+inf`.
pub const BEST_C_CEILING: f64 = 1e6;
/// Smallest C tried by the bisection. Failing here means no C > 1 works.
const BEST_C_FLOOR: f64 = 1.0 + 1e-6;

fn validate_set(set: &[usize], n: usize) -> Result<()> {
    for (pos, &i) in set.iter().enumerate() {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if set[..pos].contains(&i) {
            return Err(Error::InvalidParameter(format!("index {i} repeated in the set")));
        }
    }
    Ok(())
}

/// Builds `[A, -A]` with extra zero columns appended, plus `extra_rows`
/// zero rows below; callers fill in the rest.
fn split_null_space_block(a: &DenseMatrix, extra_cols: usize, extra_rows: usize) -> DenseMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut out = DenseMatrix::zeros(m + extra_rows, 2 * n + extra_cols);
    for i in 0..m {
        for j in 0..n {
            out[(i, j)] = a[(i, j)];
            out[(i, n + j)] = -a[(i, j)];
        }
    }
    out
}

/// `κ = max ‖w_K‖₁ / ‖w_K̄‖₁` over nonzero `w` with `A w = 0`.
///
/// Each sign pattern `s` of `w_K` gives the LP `max sᵀ w_K` subject to
/// `w ∈ null(A)`, `‖w_K̄‖₁ <= 1`; κ is the largest optimum. Patterns come in
/// `±s` pairs with equal optima, so only half are solved. Returns `+inf`
/// when some LP is unbounded, i.e. when the columns of `A` on `K` are
/// linearly dependent.
pub fn compute_kappa(a: &DenseMatrix, set: &[usize]) -> Result<f64> {
    let (m, n) = (a.rows(), a.cols());
    validate_set(set, n)?;
    if set.is_empty() {
        return Ok(0.0);
    }
    if set.len() > MAX_EXACT_SET {
        return Err(Error::SetTooLarge { size: set.len(), cap: MAX_EXACT_SET });
    }
    ensure_full_row_rank(a)?;
    let rest = complement(set, n);
    if rest.is_empty() {
        // Every null vector lives on K.
        return Ok(if m < n { f64::INFINITY } else { 0.0 });
    }

    // Variables: w (free, n), then t_i >= |w_i| for i in K̄, then a slack.
    let k = set.len();
    let n_t = rest.len();
    let vars = n + n_t + 1;
    let rows = m + 2 * n_t + 1;
    let mut eq = DenseMatrix::zeros(rows, vars + 2 * n_t);
    for i in 0..m {
        for j in 0..n {
            eq[(i, j)] = a[(i, j)];
        }
    }
    // w_i - t_i + p_i = 0 and -w_i - t_i + q_i = 0 with p, q >= 0 encode |w_i| <= t_i.
    for (r, &i) in rest.iter().enumerate() {
        let row_pos = m + 2 * r;
        eq[(row_pos, i)] = 1.0;
        eq[(row_pos, n + r)] = -1.0;
        eq[(row_pos, vars + 2 * r)] = 1.0;
        eq[(row_pos + 1, i)] = -1.0;
        eq[(row_pos + 1, n + r)] = -1.0;
        eq[(row_pos + 1, vars + 2 * r + 1)] = 1.0;
    }
    for r in 0..n_t {
        eq[(rows - 1, n + r)] = 1.0;
    }
    eq[(rows - 1, n + n_t)] = 1.0;
    let mut rhs = vec![0.0; rows];
    rhs[rows - 1] = 1.0;
    let total = vars + 2 * n_t;
    let mut lower = vec![0.0; total];
    let upper = vec![f64::INFINITY; total];
    for l in lower.iter_mut().take(n) {
        *l = f64::NEG_INFINITY;
    }

    let mut best: f64 = 0.0;
    for pattern in 0..(1u32 << (k - 1)) {
        let mut cost = vec![0.0; total];
        for (p, &i) in set.iter().enumerate() {
            let positive = p == 0 || pattern & (1 << (p - 1)) == 0;
            cost[i] = if positive { -1.0 } else { 1.0 };
        }
        let problem = LpProblem::new(cost, eq.clone(), rhs.clone(), lower.clone(), upper.clone())?;
        let sol = solve_lp(&problem)?;
        match sol.status {
            LpStatus::Optimal => best = best.max(-sol.objective_value),
            LpStatus::Unbounded => return Ok(f64::INFINITY),
            LpStatus::Infeasible => return Err(Error::Infeasible),
        }
    }
    Ok(best)
}

/// Outcome of testing `‖x_K + w_K‖₁ + ‖w_K̄‖₁ / C >= ‖x_K‖₁` on the null space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCheck {
    pub holds: bool,
    /// Minimum of `LHS - RHS` over null vectors with `‖w‖₁ <= R`. Never
    /// positive, since `w = 0` attains zero.
    pub margin: f64,
    /// Minimum of the directional derivative of `LHS - RHS` at `w = 0`
    /// along null directions normalized to decrease `‖x_K‖₁` at unit rate,
    /// shifted so that the condition holds iff this is `>= 0`. Positive
    /// values measure strict robustness; `+inf` if no null direction
    /// changes `‖x_K‖₁` to first order.
    #[serde(with = "crate::serde_inf")]
    pub strict_margin: f64,
    pub radius: f64,
}

fn validate_robustness_inputs(a: &DenseMatrix, set: &[usize], x_k: &[f64]) -> Result<()> {
    validate_set(set, a.cols())?;
    if x_k.len() != set.len() {
        return Err(Error::InvalidDimensions(format!(
            "{} values for a set of size {}",
            x_k.len(),
            set.len()
        )));
    }
    if x_k.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("x_K must be finite".into()));
    }
    ensure_full_row_rank(a)
}

/// Decides the weak-robustness condition for a fixed `K`, `x_K` and `C > 1`
/// by minimizing the convex piecewise-linear `LHS - RHS` over the null space
/// intersected with the ℓ1 ball of radius `R = 10 (1 + ‖x_K‖₁) C`.
pub fn check_weak_robustness(a: &DenseMatrix, set: &[usize], x_k: &[f64], c: f64) -> Result<RobustnessCheck> {
    if !(c > 1.0) {
        return Err(Error::InvalidParameter(format!("C must exceed 1, got {c}")));
    }
    validate_robustness_inputs(a, set, x_k)?;
    let margin = ball_minimum(a, set, x_k, c)?;
    let strict_margin = directional_margin(a, set, x_k, c)?;
    Ok(RobustnessCheck {
        holds: margin >= -ROBUSTNESS_TOL,
        margin,
        strict_margin,
        radius: robustness_radius(x_k, c),
    })
}

fn robustness_radius(x_k: &[f64], c: f64) -> f64 {
    10.0 * (1.0 + l1_norm(x_k)) * if c.is_finite() { c } else { BEST_C_CEILING }
}

/// `min ‖x_K + w_K‖₁ + ‖w_K̄‖₁ / C - ‖x_K‖₁` over `A w = 0, ‖w‖₁ <= R`.
fn ball_minimum(a: &DenseMatrix, set: &[usize], x_k: &[f64], c: f64) -> Result<f64> {
    let (m, n) = (a.rows(), a.cols());
    let k = set.len();
    // Columns: u (n), v (n), r⁺ (k), r⁻ (k), ball slack (1).
    let cols = 2 * n + 2 * k + 1;
    let mut eq = split_null_space_block(a, 2 * k + 1, k + 1);
    let mut rhs = vec![0.0; m + k + 1];
    for (p, &i) in set.iter().enumerate() {
        let row = m + p;
        eq[(row, 2 * n + p)] = 1.0;
        eq[(row, 2 * n + k + p)] = -1.0;
        eq[(row, i)] = -1.0;
        eq[(row, n + i)] = 1.0;
        rhs[row] = x_k[p];
    }
    let ball = m + k;
    for j in 0..2 * n {
        eq[(ball, j)] = 1.0;
    }
    eq[(ball, cols - 1)] = 1.0;
    rhs[ball] = robustness_radius(x_k, c);

    let mut cost = vec![0.0; cols];
    let inv_c = if c.is_finite() { 1.0 / c } else { 0.0 };
    for i in complement(set, n) {
        cost[i] = inv_c;
        cost[n + i] = inv_c;
    }
    for p in 0..2 * k {
        cost[2 * n + p] = 1.0;
    }
    let sol = solve_lp(&LpProblem::nonnegative(cost, eq, rhs)?)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value - l1_norm(x_k)),
        LpStatus::Infeasible => Err(Error::Infeasible),
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// `min Σ_{K₀}|dᵢ| + ‖d_K̄‖₁ / C - 1` over `A d = 0` with
/// `Σ_{K \ K₀} sign(xᵢ) dᵢ = -1`, where `K₀` are the zero entries of `x_K`.
fn directional_margin(a: &DenseMatrix, set: &[usize], x_k: &[f64], c: f64) -> Result<f64> {
    let (m, n) = (a.rows(), a.cols());
    if x_k.iter().all(|&v| v == 0.0) {
        // No null direction can decrease ‖x_K‖₁ to first order.
        return Ok(f64::INFINITY);
    }
    let mut eq = split_null_space_block(a, 0, 1);
    for (p, &i) in set.iter().enumerate() {
        if x_k[p] != 0.0 {
            let s = x_k[p].signum();
            eq[(m, i)] = s;
            eq[(m, n + i)] = -s;
        }
    }
    let mut rhs = vec![0.0; m + 1];
    rhs[m] = -1.0;
    let inv_c = if c.is_finite() { 1.0 / c } else { 0.0 };
    let mut cost = vec![0.0; 2 * n];
    for i in complement(set, n) {
        cost[i] = inv_c;
        cost[n + i] = inv_c;
    }
    for (p, &i) in set.iter().enumerate() {
        if x_k[p] == 0.0 {
            cost[i] = 1.0;
            cost[n + i] = 1.0;
        }
    }
    let sol = solve_lp(&LpProblem::nonnegative(cost, eq, rhs)?)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value - 1.0),
        LpStatus::Infeasible => Ok(f64::INFINITY),
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// Largest C (to [`BEST_C_RESOLUTION`]) for which the robustness condition
/// holds, found by bisection on `(1, 1e6]`. Returns `+inf` if it holds at the
/// ceiling and exactly `1.0` if it fails for every `C > 1`.
pub fn estimate_best_c(a: &DenseMatrix, set: &[usize], x_k: &[f64]) -> Result<f64> {
    validate_robustness_inputs(a, set, x_k)?;
    if set.is_empty() {
        return Ok(f64::INFINITY);
    }
    let holds = |c: f64| -> Result<bool> { Ok(ball_minimum(a, set, x_k, c)? >= -ROBUSTNESS_TOL) };
    if holds(BEST_C_CEILING)? {
        return Ok(f64::INFINITY);
    }
    if !holds(BEST_C_FLOOR)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (BEST_C_FLOOR, BEST_C_CEILING);
    while hi - lo > BEST_C_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The threshold C directly: when every entry of `x_K` is nonzero, the
/// condition holds exactly for `C <= min ‖d_K̄‖₁` over null vectors with
/// `Σ sign(xᵢ) dᵢ = -1` on `K`. Returns `None` if `x_K` has zero entries.
pub fn critical_c(a: &DenseMatrix, set: &[usize], x_k: &[f64]) -> Result<Option<f64>> {
    validate_robustness_inputs(a, set, x_k)?;
    if x_k.contains(&0.0) {
        return Ok(None);
    }
    // With C = 1 the directional margin is exactly min ‖d_K̄‖₁ - 1.
    Ok(Some(directional_margin(a, set, x_k, 1.0)? + 1.0))
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 1.0) {
        return Err(Error::InvalidParameter(format!("C must exceed 1, got {c}")));
    }
    Ok(())
}

/// `C / (C - 1)`, with its limit 1 at `C = inf`.
fn c_ratio(c: f64) -> f64 {
    if c.is_infinite() {
        1.0
    } else {
        c / (c - 1.0)
    }
}

/// `‖x - x̂‖₁ <= 2C(1 + κ)/(C - 1) · ‖x_K̄‖₁`.
pub fn recovery_error_bound(c: f64, kappa: f64, tail_mass: f64) -> Result<f64> {
    check_c(c)?;
    if !(kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be nonnegative, got {kappa}")));
    }
    if tail_mass == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * c_ratio(c) * (1.0 + kappa) * tail_mass)
}

/// Bound on the number of indices of the selected set outside the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportErrorBound {
    pub value: f64,
    #[serde(with = "crate::serde_inf")]
    pub c: f64,
    pub kappa: f64,
    pub a1: f64,
    pub delta: f64,
}

/// Sum of the two miscount terms: zeros whose estimate exceeds `a₁/2`, and
/// strong entries whose estimate falls below it. Equals
/// `4C(1 + κ)Δ / ((C - 1) a₁)`.
pub fn support_error_bound(c: f64, kappa: f64, a1: f64, delta: f64) -> Result<SupportErrorBound> {
    check_c(c)?;
    if !(a1 > 0.0) {
        return Err(Error::InvalidParameter(format!("a1 must be positive, got {a1}")));
    }
    if !(kappa >= 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidParameter("kappa and delta must be nonnegative".into()));
    }
    let value = if delta == 0.0 {
        0.0
    } else {
        let half = a1 / 2.0;
        let outside = 2.0 * c_ratio(c) / half * delta;
        let dropped = 2.0 * c_ratio(c) * kappa / half * delta;
        outside + dropped
    };
    Ok(SupportErrorBound { value, c, kappa, a1, delta })
}

/// A bound clamped into `[0, 1]`, keeping the raw formula value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBound {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl ProbabilityBound {
    fn from_raw(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self { value, raw, clamped: value != raw }
    }
}

fn check_open_fraction(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidFraction(format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(())
}

/// `P₁ >= 1 - 4C(κ+1) / ((C-1) a₁ ρ_F δ) · Δ/n`.
pub fn p1_lower_bound(
    c: f64,
    kappa: f64,
    a1: f64,
    delta: f64,
    rho_f: f64,
    deltam: f64,
    n: usize,
) -> Result<ProbabilityBound> {
    let miss = support_error_bound(c, kappa, a1, delta)?;
    check_open_fraction("rho_F", rho_f)?;
    check_open_fraction("delta", deltam)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(ProbabilityBound::from_raw(1.0 - miss.value / (rho_f * deltam * n as f64)))
}

/// `P₂ <= (k_total - (1-ε)ρ_F δ n + 4C(κ+1)Δ/((C-1)a₁)) / (n - (1-ε)ρ_F δ n)`.
#[allow(clippy::too_many_arguments)]
pub fn p2_upper_bound(
    k_total: usize,
    eps: f64,
    rho_f: f64,
    deltam: f64,
    n: usize,
    c: f64,
    kappa: f64,
    a1: f64,
    delta: f64,
) -> Result<ProbabilityBound> {
    let miss = support_error_bound(c, kappa, a1, delta)?;
    check_open_fraction("eps", eps)?;
    check_open_fraction("rho_F", rho_f)?;
    check_open_fraction("delta", deltam)?;
    let block = (1.0 - eps) * rho_f * deltam * n as f64;
    let denom = n as f64 - block;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter("second block is empty".into()));
    }
    Ok(ProbabilityBound::from_raw((k_total as f64 - block + miss.value) / denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    ExactEnumeration,
    ConvexMinimization,
}

/// Per-(A, K, x_K) certificate quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCertificate {
    #[serde(rename = "K")]
    pub set: Vec<usize>,
    #[serde(with = "crate::serde_inf")]
    pub kappa: f64,
    #[serde(rename = "best_C", with = "crate::serde_inf")]
    pub best_c: f64,
    /// Robustness minimum at `best_c` (`None` when no `C > 1` holds).
    pub margin: Option<f64>,
    pub kappa_method: CertificateMethod,
    pub c_method: CertificateMethod,
}

impl RobustnessCertificate {
    pub fn compute(a: &DenseMatrix, set: &[usize], x_k: &[f64]) -> Result<Self> {
        let kappa = compute_kappa(a, set)?;
        let best_c = estimate_best_c(a, set, x_k)?;
        let margin = if best_c > 1.0 {
            Some(ball_minimum(a, set, x_k, best_c.min(BEST_C_CEILING))?)
        } else {
            None
        };
        Ok(Self {
            set: set.to_vec(),
            kappa,
            best_c,
            margin,
            kappa_method: CertificateMethod::ExactEnumeration,
            c_method: CertificateMethod::ConvexMinimization,
        })
    }

    /// Usable for the bounds: some `C > 1 + resolution` holds and κ is finite.
    pub fn is_certified(&self) -> bool {
        self.best_c > 1.0 + BEST_C_RESOLUTION && self.kappa.is_finite()
    }

    /// The C to plug into the bound formulas (`best_c`, or the ceiling).
    pub fn usable_c(&self) -> f64 {
        self.best_c.min(BEST_C_CEILING)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_gaussian_matrix, Seed};

    fn row(v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_rows(&[v.to_vec()]).unwrap()
    }

    #[test]
    fn kappa_of_row_vectors() {
        assert!((compute_kappa(&row(&[1.0, 1.0]), &[0]).unwrap() - 1.0).abs() < 1e-9);
        assert!((compute_kappa(&row(&[1.0, 2.0]), &[0]).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(compute_kappa(&row(&[1.0, 2.0]), &[]).unwrap(), 0.0);
    }

    #[test]
    fn kappa_infinite_for_dependent_columns() {
        // Columns 0 and 1 coincide, so (1, -1, 0, 0) is a null vector supported on K.
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0, 0.0, 2.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap();
        assert!(compute_kappa(&a, &[0, 1]).unwrap().is_infinite());
    }

    #[test]
    fn kappa_guards() {
        let a = sample_gaussian_matrix(10, 30, Seed(1)).unwrap();
        let big: Vec<usize> = (0..17).collect();
        assert!(matches!(compute_kappa(&a, &big), Err(Error::SetTooLarge { .. })));
        assert!(compute_kappa(&a, &[30]).is_err());
        let dup = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(compute_kappa(&dup, &[0]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn empty_set_always_robust() {
        let a = row(&[1.0, 1.0]);
        for c in [1.5, 10.0, 1e5] {
            let r = check_weak_robustness(&a, &[], &[], c).unwrap();
            assert!(r.holds);
            assert!(r.margin.abs() < 1e-12);
        }
        assert!(estimate_best_c(&a, &[], &[]).unwrap().is_infinite());
    }

    #[test]
    fn hand_checked_violation() {
        // w = (-5, 5) gives 0 + 5/2 < 5.
        let a = row(&[1.0, 1.0]);
        let r = check_weak_robustness(&a, &[0], &[5.0], 2.0).unwrap();
        assert!(!r.holds);
        assert!((r.margin + 2.5).abs() < 1e-9, "margin {}", r.margin);
        assert!(r.strict_margin < 0.0);
        assert_eq!(estimate_best_c(&a, &[0], &[5.0]).unwrap(), 1.0);
        assert!((critical_c(&a, &[0], &[5.0]).unwrap().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn c_must_exceed_one() {
        assert!(check_weak_robustness(&row(&[1.0, 1.0]), &[0], &[1.0], 1.0).is_err());
        assert!(recovery_error_bound(1.0, 0.0, 1.0).is_err());
        assert!(support_error_bound(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(support_error_bound(2.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(recovery_error_bound(3.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((recovery_error_bound(3.0, 1.0, 0.1).unwrap() - 0.6).abs() < 1e-12);
        let near_one = recovery_error_bound(1.0001, 0.0, 1.0).unwrap();
        assert!((near_one - 20002.0).abs() < 1e-6);

        assert!((support_error_bound(3.0, 1.0, 1.0, 0.1).unwrap().value - 1.2).abs() < 1e-12);
        assert_eq!(support_error_bound(3.0, 1.0, 1.0, 0.0).unwrap().value, 0.0);
        let limit = support_error_bound(1e6, 0.0, 1.0, 0.3).unwrap().value;
        assert!((limit - 1.2).abs() <= 1e-5 * 1.2);

        let p1 = p1_lower_bound(3.0, 1.0, 1.0, 1.0, 0.5, 0.2, 1000).unwrap();
        assert!((p1.value - 0.88).abs() < 1e-12 && !p1.clamped);
        assert_eq!(p1_lower_bound(3.0, 1.0, 1.0, 0.0, 0.5, 0.2, 1000).unwrap().value, 1.0);
        let clamped = p1_lower_bound(1.01, 5.0, 1.0, 10.0, 0.5, 0.2, 100).unwrap();
        assert!(clamped.clamped && clamped.value == 0.0 && clamped.raw < 0.0);

        // k_total equal to the first block size and no tail: P₂ bound is 0.
        let (eps, rho, dm, n) = (0.01, 0.4, 0.5, 1000usize);
        let block = ((1.0 - eps) * rho * dm * n as f64).round() as usize;
        let p2 = p2_upper_bound(block, eps, rho, dm, n, 3.0, 1.0, 1.0, 0.0).unwrap();
        assert!(p2.value.abs() < 1e-12);
    }

    #[test]
    fn kappa_is_scale_invariant() {
        let a = sample_gaussian_matrix(5, 9, Seed(13)).unwrap();
        let k = compute_kappa(&a, &[1, 4]).unwrap();
        for alpha in [-3.0, 0.01, 250.0] {
            let ks = compute_kappa(&a.scaled(alpha), &[1, 4]).unwrap();
            assert!((k - ks).abs() <= 1e-9 * k.max(1.0), "{k} vs {ks}");
        }
    }
}
