//! Dense two-phase primal simplex on the bounded-variable standard form
//! `min cᵀx, A x = b, 0 <= x <= u` (entries of `u` may be infinite).
//!
//! Pricing is Dantzig's rule; after a long run of degenerate pivots the
//! solver falls back to Bland's rule until a pivot makes progress. The
//! ratio test is the two-pass Harris variant. Once a basis is declared
//! optimal, the basic values and reduced costs are recomputed from a
//! fresh LU factorization of the basis, and iteration resumes if that
//! reveals drift.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Lu};

/// Reduced-cost optimality tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Primal feasibility tolerance used by the ratio test.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative phase-one residual above which the problem is infeasible.
pub const PHASE_ONE_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-9;
const MAX_REFACTORIZATIONS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug)]
pub(crate) struct StandardSolution {
    pub outcome: Outcome,
    pub x: Vec<f64>,
    pub iterations: usize,
}

struct Tableau<'a> {
    a: &'a DenseMatrix,
    b: &'a [f64],
    upper: &'a [f64],
    /// Number of structural columns; artificial column `k` is `n + k`.
    n: usize,
    /// Row signs applied so that the initial right-hand side is nonnegative.
    row_sign: Vec<f64>,
    /// Original row index of each tableau row (rows may be dropped).
    row_ids: Vec<usize>,
    width: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    d: Vec<f64>,
    iterations: usize,
    limit: usize,
}

impl<'a> Tableau<'a> {
    fn new(a: &'a DenseMatrix, b: &'a [f64], upper: &'a [f64]) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let width = n + m;
        let row_sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let s = row_sign[i];
            for j in 0..n {
                t[i * width + j] = s * a[(i, j)];
            }
            t[i * width + n + i] = 1.0;
        }
        let beta = b.iter().zip(&row_sign).map(|(v, s)| v * s).collect();
        let mut state = vec![VarState::AtLower; width];
        for k in 0..m {
            state[n + k] = VarState::Basic;
        }
        Self {
            a,
            b,
            upper,
            n,
            row_sign,
            row_ids: (0..m).collect(),
            width,
            t,
            beta,
            basis: (n..n + m).collect(),
            state,
            d: vec![0.0; width],
            iterations: 0,
            limit: 50 * (m + n).max(1),
        }
    }

    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn upper_of(&self, j: usize) -> f64 {
        if j < self.n {
            self.upper[j]
        } else {
            f64::INFINITY
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn value_of_nonbasic(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtUpper => self.upper_of(j),
            _ => 0.0,
        }
    }

    /// Reduced costs `d = c - c_Bᵀ T` for the given cost vector over all columns.
    fn price(&mut self, cost: &[f64]) {
        let mut d = cost.to_vec();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.width..(i + 1) * self.width];
            for (dj, tij) in d.iter_mut().zip(row) {
                *dj -= cb * tij;
            }
        }
        for &bj in &self.basis {
            d[bj] = 0.0;
        }
        self.d = d;
    }

    fn choose_entering(&self, allowed: usize, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..allowed {
            let dir = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower if self.upper_of(j) > 0.0 && self.d[j] < -OPTIMALITY_TOL => 1.0,
                VarState::AtUpper if self.d[j] > OPTIMALITY_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            let score = self.d[j].abs();
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Harris two-pass ratio test. Returns the step length and the leaving
    /// row (with whether it leaves at its upper bound), or `None` for the row
    /// when the entering variable's own bound is the binding limit.
    fn ratio_test(&self, j: usize, dir: f64, bland: bool) -> (f64, Option<(usize, bool)>) {
        let m = self.rows();
        // Bland's rule needs the exact minimum ratio.
        let slack = if bland { 0.0 } else { FEASIBILITY_TOL };
        let mut relaxed = f64::INFINITY;
        for i in 0..m {
            let alpha = dir * self.entry(i, j);
            if alpha > PIVOT_TOL {
                relaxed = relaxed.min((self.beta[i].max(0.0) + slack) / alpha);
            } else if alpha < -PIVOT_TOL {
                let ub = self.upper_of(self.basis[i]);
                if ub.is_finite() {
                    relaxed = relaxed.min((ub - self.beta[i].min(ub) + slack) / -alpha);
                }
            }
        }
        let own = self.upper_of(j);
        if own <= relaxed {
            return (own, None);
        }
        if !relaxed.is_finite() {
            return (f64::INFINITY, None);
        }
        let mut pick: Option<(usize, bool, f64, f64)> = None;
        for i in 0..m {
            let alpha = dir * self.entry(i, j);
            let (ratio, to_upper) = if alpha > PIVOT_TOL {
                (self.beta[i].max(0.0) / alpha, false)
            } else if alpha < -PIVOT_TOL {
                let ub = self.upper_of(self.basis[i]);
                if !ub.is_finite() {
                    continue;
                }
                ((ub - self.beta[i].min(ub)) / -alpha, true)
            } else {
                continue;
            };
            if ratio > relaxed {
                continue;
            }
            let better = match pick {
                None => true,
                Some((r, _, _, best_alpha)) => {
                    if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        alpha.abs() > best_alpha
                    }
                }
            };
            if better {
                pick = Some((i, to_upper, ratio, alpha.abs()));
            }
        }
        match pick {
            Some((i, to_upper, ratio, _)) => (ratio, Some((i, to_upper))),
            None => (f64::INFINITY, None),
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width;
        let piv = self.t[r * w + j];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.t[i * w + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[j] = 0.0;
        }
        let dj = self.d[j];
        if dj != 0.0 {
            for (v, p) in self.d.iter_mut().zip(&pivot_row) {
                *v -= dj * p;
            }
            self.d[j] = 0.0;
        }
        self.basis[r] = j;
        self.state[j] = VarState::Basic;
    }

    /// Runs simplex iterations for `cost` over the first `allowed` columns.
    fn iterate(&mut self, cost: &[f64], allowed: usize, verify: bool) -> Result<Outcome> {
        let degenerate_limit = 5 * (self.rows() + self.n);
        let mut degenerate_run = 0usize;
        let mut refactorizations = 0usize;
        loop {
            let bland = degenerate_run > degenerate_limit;
            let Some((j, dir)) = self.choose_entering(allowed, bland) else {
                if verify && refactorizations < MAX_REFACTORIZATIONS {
                    refactorizations += 1;
                    if let Some(lu) = self.refresh(cost) {
                        if self.choose_entering(allowed, false).is_some() {
                            self.rebuild_tableau(&lu);
                            self.price(cost);
                            continue;
                        }
                    }
                }
                return Ok(Outcome::Optimal);
            };
            if self.iterations >= self.limit {
                return Err(Error::IterationLimit(self.limit));
            }
            self.iterations += 1;

            let (theta, leave) = self.ratio_test(j, dir, bland);
            if !theta.is_finite() {
                return Ok(Outcome::Unbounded);
            }
            if theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let step = dir * theta;
            for i in 0..self.rows() {
                let tij = self.entry(i, j);
                if tij != 0.0 {
                    self.beta[i] -= step * tij;
                }
            }
            match leave {
                None => {
                    self.state[j] = match self.state[j] {
                        VarState::AtLower => VarState::AtUpper,
                        _ => VarState::AtLower,
                    };
                }
                Some((r, to_upper)) => {
                    let entering_value = if dir > 0.0 { theta } else { self.upper_of(j) - theta };
                    let leaving = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.state[leaving] = if to_upper { VarState::AtUpper } else { VarState::AtLower };
                }
            }
        }
    }

    /// Column `j` of the row-signed constraint matrix restricted to kept rows.
    fn signed_column(&self, j: usize) -> Vec<f64> {
        self.row_ids
            .iter()
            .map(|&i| {
                if j < self.n {
                    self.row_sign[i] * self.a[(i, j)]
                } else if j - self.n == i {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Recomputes basic values and reduced costs from a fresh factorization
    /// of the basis matrix. Returns the factorization, or `None` if the basis
    /// is numerically singular (state is then left untouched).
    fn refresh(&mut self, cost: &[f64]) -> Option<Lu> {
        let m = self.rows();
        let mut bmat = DenseMatrix::zeros(m, m);
        for (c, &bj) in self.basis.iter().enumerate() {
            for (i, v) in self.signed_column(bj).into_iter().enumerate() {
                bmat[(i, c)] = v;
            }
        }
        let lu = Lu::factor(&bmat)?;
        let mut rhs: Vec<f64> = self.row_ids.iter().map(|&i| self.row_sign[i] * self.b[i]).collect();
        for j in 0..self.width {
            if self.state[j] == VarState::AtUpper {
                let u = self.upper_of(j);
                for (r, v) in rhs.iter_mut().zip(self.signed_column(j)) {
                    *r -= u * v;
                }
            }
        }
        self.beta = lu.solve(&rhs);
        let cb: Vec<f64> = self.basis.iter().map(|&bj| cost[bj]).collect();
        let duals = lu.solve_transpose(&cb);
        #[allow(clippy::needless_range_loop)]
        for j in 0..self.width {
            self.d[j] = if self.state[j] == VarState::Basic {
                0.0
            } else {
                cost[j] - self.signed_column(j).iter().zip(&duals).map(|(a, y)| a * y).sum::<f64>()
            };
        }
        Some(lu)
    }

    fn rebuild_tableau(&mut self, lu: &Lu) {
        let m = self.rows();
        let mut t = vec![0.0; m * self.width];
        for j in 0..self.width {
            let col = lu.solve(&self.signed_column(j));
            for i in 0..m {
                t[i * self.width + j] = col[i];
            }
        }
        for (c, &bj) in self.basis.iter().enumerate() {
            for i in 0..m {
                t[i * self.width + bj] = if i == c { 1.0 } else { 0.0 };
            }
        }
        self.t = t;
    }

    /// After phase one: pivot basic artificials out, dropping rows that are
    /// linearly dependent on the others.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows() {
            if self.basis[r] < self.n {
                r += 1;
                continue;
            }
            let candidate = (0..self.n)
                .filter(|&j| self.state[j] != VarState::Basic)
                .map(|j| (j, self.entry(r, j).abs()))
                .filter(|&(_, v)| v > 1e-7)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match candidate {
                Some((j, _)) => {
                    let leaving = self.basis[r];
                    let value = self.value_of_nonbasic(j);
                    self.pivot(r, j);
                    self.beta[r] = value;
                    self.state[leaving] = VarState::AtLower;
                    r += 1;
                }
                None => self.drop_row(r),
            }
        }
    }

    fn drop_row(&mut self, r: usize) {
        let w = self.width;
        self.t.drain(r * w..(r + 1) * w);
        self.beta.remove(r);
        let art = self.basis.remove(r);
        self.state[art] = VarState::AtLower;
        self.row_ids.remove(r);
    }

    fn primal(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n).map(|j| self.value_of_nonbasic(j)).collect();
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.n {
                // Clamp round-off at the bounds; anything larger is left visible.
                let v = self.beta[i];
                let ub = self.upper_of(bj);
                x[bj] = if v < 0.0 && v > -FEASIBILITY_TOL {
                    0.0
                } else if v > ub && v < ub + FEASIBILITY_TOL {
                    ub
                } else {
                    v
                };
            }
        }
        x
    }
}

/// Solves `min cᵀx, A x = b, 0 <= x <= upper`.
pub(crate) fn solve_standard(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    upper: &[f64],
) -> Result<StandardSolution> {
    let (m, n) = (a.rows(), a.cols());
    let mut tab = Tableau::new(a, b, upper);

    if m > 0 {
        let mut phase_one_cost = vec![0.0; n + m];
        phase_one_cost[n..].iter_mut().for_each(|v| *v = 1.0);
        tab.price(&phase_one_cost);
        tab.iterate(&phase_one_cost, n, false)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.beta)
            .filter(|(&bj, _)| bj >= n)
            .map(|(_, v)| v.abs())
            .sum();
        let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > PHASE_ONE_TOL * scale {
            return Ok(StandardSolution {
                outcome: Outcome::Infeasible,
                x: vec![0.0; n],
                iterations: tab.iterations,
            });
        }
        tab.expel_artificials();
    }

    let mut phase_two_cost = c.to_vec();
    phase_two_cost.resize(n + m, 0.0);
    tab.price(&phase_two_cost);
    let outcome = tab.iterate(&phase_two_cost, n, true)?;
    Ok(StandardSolution { outcome, x: tab.primal(), iterations: tab.iterations })
}
