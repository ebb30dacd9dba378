//! Linear programming: a general equality-form LP with per-variable bounds,
//! solved by the dense simplex in [`simplex`], and the ℓ1 / weighted-ℓ1
//! recovery programs expressed on top of it.

mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, DenseMatrix};

pub use simplex::{FEASIBILITY_TOL, OPTIMALITY_TOL, PHASE_ONE_TOL};

/// Relative equality-residual bound every reported optimum must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `min cᵀx  s.t.  A x = b,  lower <= x <= upper`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub eq_matrix: DenseMatrix,
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        eq_matrix: DenseMatrix,
        eq_rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        if eq_matrix.cols() != n || eq_matrix.rows() != eq_rhs.len() {
            return Err(Error::InvalidDimensions(format!(
                "{}x{} constraint matrix with {} costs and {} right-hand sides",
                eq_matrix.rows(),
                eq_matrix.cols(),
                n,
                eq_rhs.len()
            )));
        }
        if lower.len() != n || upper.len() != n {
            return Err(Error::InvalidDimensions("bound vectors must match the variable count".into()));
        }
        for j in 0..n {
            if lower[j].is_nan() || upper[j].is_nan() || lower[j] > upper[j] {
                return Err(Error::InvalidParameter(format!(
                    "variable {j} has bounds [{}, {}]",
                    lower[j], upper[j]
                )));
            }
            if lower[j] == f64::INFINITY || upper[j] == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!("variable {j} has an empty bound range")));
            }
        }
        if objective.iter().chain(&eq_rhs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite cost or right-hand side".into()));
        }
        Ok(Self { objective, eq_matrix, eq_rhs, lower, upper })
    }

    /// All variables in `[0, +inf)`.
    pub fn nonnegative(objective: Vec<f64>, eq_matrix: DenseMatrix, eq_rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, eq_matrix, eq_rhs, vec![0.0; n], vec![f64::INFINITY; n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Meaningful only when `status` is optimal.
    pub primal: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// How an original variable is expressed through nonnegative standard columns.
#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// `x = offset + s`
    Shift { col: usize, offset: f64 },
    /// `x = offset - s`
    Reflect { col: usize, offset: f64 },
    /// `x = s⁺ - s⁻`
    Split { pos: usize, neg: usize },
}

/// Solves a general LP. Infeasible and unbounded problems are reported
/// through `status`; only a pivot-limit overrun is an error.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let (m, n) = (p.eq_matrix.rows(), p.num_vars());
    let mut maps = Vec::with_capacity(n);
    let mut columns: Vec<(usize, f64)> = Vec::with_capacity(n); // (source var, sign)
    let mut upper = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    let mut rhs = p.eq_rhs.clone();
    for j in 0..n {
        let (lo, hi, c) = (p.lower[j], p.upper[j], p.objective[j]);
        let col = columns.len();
        let map = if lo.is_finite() {
            columns.push((j, 1.0));
            upper.push(hi - lo);
            cost.push(c);
            ColumnMap::Shift { col, offset: lo }
        } else if hi.is_finite() {
            columns.push((j, -1.0));
            upper.push(f64::INFINITY);
            cost.push(-c);
            ColumnMap::Reflect { col, offset: hi }
        } else {
            columns.push((j, 1.0));
            columns.push((j, -1.0));
            upper.extend([f64::INFINITY, f64::INFINITY]);
            cost.extend([c, -c]);
            ColumnMap::Split { pos: col, neg: col + 1 }
        };
        if let ColumnMap::Shift { offset, .. } | ColumnMap::Reflect { offset, .. } = map {
            if offset != 0.0 {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= p.eq_matrix[(i, j)] * offset;
                }
            }
        }
        maps.push(map);
    }
    let mut std_a = DenseMatrix::zeros(m, columns.len());
    for (c, &(j, sign)) in columns.iter().enumerate() {
        for i in 0..m {
            std_a[(i, c)] = sign * p.eq_matrix[(i, j)];
        }
    }

    let sol = simplex::solve_standard(&std_a, &rhs, &cost, &upper)?;
    let status = match sol.outcome {
        simplex::Outcome::Optimal => LpStatus::Optimal,
        simplex::Outcome::Infeasible => LpStatus::Infeasible,
        simplex::Outcome::Unbounded => LpStatus::Unbounded,
    };
    let primal: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Shift { col, offset } => offset + sol.x[col],
            ColumnMap::Reflect { col, offset } => offset - sol.x[col],
            ColumnMap::Split { pos, neg } => sol.x[pos] - sol.x[neg],
        })
        .collect();
    let objective_value = match status {
        LpStatus::Optimal => p.objective.iter().zip(&primal).map(|(c, x)| c * x).sum(),
        LpStatus::Infeasible => f64::NAN,
        LpStatus::Unbounded => f64::NEG_INFINITY,
    };
    Ok(LpSolution { status, primal, objective_value, iterations: sol.iterations })
}

/// Strictly positive per-coordinate weights for weighted ℓ1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) =
            weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::NonpositiveWeight { index, value });
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// `inside` on the listed indices, `outside` everywhere else.
    pub fn two_level(n: usize, set: &[usize], inside: f64, outside: f64) -> Result<Self> {
        let mut w = vec![outside; n];
        for &i in set {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            w[i] = inside;
        }
        Self::new(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * alpha).collect())
    }

    /// `Σ wᵢ |xᵢ|`.
    pub fn weighted_norm(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(w, v)| w * v.abs()).sum()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Minimizer of a (weighted) ℓ1 program together with its objective value.
#[derive(Debug, Clone)]
pub struct L1Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `max |A x - y|`.
    pub residual: f64,
    pub iterations: usize,
}

/// `min ‖x‖₁ s.t. A x = y`.
pub fn l1_minimize(a: &DenseMatrix, y: &[f64]) -> Result<L1Solution> {
    weighted_l1_minimize(a, y, &WeightVector::uniform(a.cols()))
}

/// `min Σ wᵢ|xᵢ| s.t. A x = y`, encoded with `x = u - v`, `u, v >= 0`.
pub fn weighted_l1_minimize(a: &DenseMatrix, y: &[f64], w: &WeightVector) -> Result<L1Solution> {
    let (m, n) = (a.rows(), a.cols());
    if y.len() != m {
        return Err(Error::InvalidDimensions(format!("y has length {}, expected {m}", y.len())));
    }
    if w.len() != n {
        return Err(Error::InvalidDimensions(format!("{} weights for {n} unknowns", w.len())));
    }
    let mut split = DenseMatrix::zeros(m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            split[(i, j)] = a[(i, j)];
            split[(i, n + j)] = -a[(i, j)];
        }
    }
    let mut cost = w.as_slice().to_vec();
    cost.extend_from_slice(w.as_slice());
    let problem = LpProblem::nonnegative(cost, split, y.to_vec())?;
    let sol = solve_lp(&problem)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Infeasible),
        LpStatus::Unbounded => return Err(Error::Unbounded),
    }
    let x: Vec<f64> = (0..n).map(|j| sol.primal[j] - sol.primal[n + j]).collect();
    let residual = a.residual_max(&x, y);
    if residual > RESIDUAL_TOL * (1.0 + max_abs(y)) {
        return Err(Error::Inaccurate { residual });
    }
    Ok(L1Solution { objective: w.weighted_norm(&x), x, residual, iterations: sol.iterations })
}
