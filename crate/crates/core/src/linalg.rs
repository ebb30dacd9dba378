//! Dense real matrices, vector norms, and the orthogonal factorizations the
//! rest of the crate leans on (rank decisions, null-space bases, square solves).

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative cutoff for numerical rank, applied to the largest column norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite matrix entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDimensions("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matrix-vector length mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (c, &j) in cols.iter().enumerate() {
                out[(i, c)] = self[(i, j)];
            }
        }
        out
    }

    /// `max |A x - y|`.
    pub fn residual_max(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(x)
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// ℓ1 norm of `v` over the index set `set`.
pub fn restricted_l1(v: &[f64], set: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    for &i in set {
        let x = v.get(i).ok_or(Error::IndexOutOfRange { index: i, len: v.len() })?;
        total += x.abs();
    }
    Ok(total)
}

/// Sorted indices of `0..n` not in `set`.
pub fn complement(set: &[usize], n: usize) -> Vec<usize> {
    let mut member = vec![false; n];
    for &i in set {
        if i < n {
            member[i] = true;
        }
    }
    (0..n).filter(|&i| !member[i]).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Householder QR with column pivoting, `M P = Q R`.
///
/// Reflectors are stored as unit vectors `v_k` acting on rows `k..`, so
/// `H_k = I - 2 v_k v_kᵀ` and `Q = H_0 H_1 ... H_{p-1}`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    rows: usize,
    reflectors: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub fn factor(m: &DenseMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..cols).collect();
        let steps = rows.min(cols);
        let mut reflectors = Vec::with_capacity(steps);
        let mut r_diag = Vec::with_capacity(steps);

        let col_norm_sq = |a: &DenseMatrix, j: usize, from: usize| -> f64 {
            (from..rows).map(|i| a[(i, j)] * a[(i, j)]).sum()
        };
        let largest = (0..cols).map(|j| col_norm_sq(&a, j, 0).sqrt()).fold(0.0, f64::max);
        let cutoff = RANK_TOLERANCE * largest;

        for k in 0..steps {
            // Recompute trailing norms each step; matrices here are small.
            let (pivot, pivot_norm_sq) = (k..cols)
                .map(|j| (j, col_norm_sq(&a, j, k)))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot != k {
                for i in 0..rows {
                    let tmp = a[(i, k)];
                    a[(i, k)] = a[(i, pivot)];
                    a[(i, pivot)] = tmp;
                }
                perm.swap(k, pivot);
            }
            let norm = pivot_norm_sq.max(0.0).sqrt();
            let mut v: Vec<f64> = (k..rows).map(|i| a[(i, k)]).collect();
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vnorm = l2_norm(&v);
            if vnorm > 0.0 && norm > 0.0 {
                for x in &mut v {
                    *x /= vnorm;
                }
                for j in k..cols {
                    let proj: f64 = (k..rows).map(|i| v[i - k] * a[(i, j)]).sum();
                    for i in k..rows {
                        a[(i, j)] -= 2.0 * proj * v[i - k];
                    }
                }
            } else {
                v.iter_mut().for_each(|x| *x = 0.0);
            }
            r_diag.push(a[(k, k)]);
            reflectors.push(v);
        }

        let rank = r_diag.iter().take_while(|d| d.abs() > cutoff).count();
        Self { rows, reflectors, r_diag, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn r_diagonal(&self) -> &[f64] {
        &self.r_diag
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `Q e_j` for the full orthogonal factor.
    pub fn q_column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.rows];
        e[j] = 1.0;
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let proj: f64 = (k..self.rows).map(|i| v[i - k] * e[i]).sum();
            for i in k..self.rows {
                e[i] -= 2.0 * proj * v[i - k];
            }
        }
        e
    }
}

/// Numerical rank of `a` by pivoted QR with the crate-wide cutoff.
pub fn numerical_rank(a: &DenseMatrix) -> usize {
    if a.rows() <= a.cols() {
        PivotedQr::factor(&a.transpose()).rank()
    } else {
        PivotedQr::factor(a).rank()
    }
}

/// Fails with `RankDeficient` unless `a` has full row rank.
pub fn ensure_full_row_rank(a: &DenseMatrix) -> Result<()> {
    let rank = numerical_rank(a);
    if rank < a.rows() {
        return Err(Error::RankDeficient { rank, rows: a.rows() });
    }
    Ok(())
}

/// Orthonormal basis of `{w : A w = 0}` as the columns of an `n x (n - m)` matrix.
///
/// Requires full row rank; the basis is the trailing block of the orthogonal
/// factor of `Aᵀ`.
pub fn null_space_basis(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = (a.rows(), a.cols());
    if m > n {
        return Err(Error::InvalidDimensions(format!("{m}x{n} has more rows than columns")));
    }
    let qr = PivotedQr::factor(&a.transpose());
    if qr.rank() < m {
        return Err(Error::RankDeficient { rank: qr.rank(), rows: m });
    }
    let mut basis = DenseMatrix::zeros(n, n - m);
    for (c, j) in (m..n).enumerate() {
        let q = qr.q_column(j);
        for i in 0..n {
            basis[(i, c)] = q[i];
        }
    }
    Ok(basis)
}

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot falls below `1e-13` times the largest entry.
    pub fn factor(m: &DenseMatrix) -> Option<Self> {
        let n = m.rows();
        assert_eq!(n, m.cols(), "LU needs a square matrix");
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))?;
            if a[(p, k)].abs() <= 1e-13 * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    /// `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// `Mᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Uᵀ z = b, then Lᵀ u = z, then x = Pᵀ u.
        let mut z = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}

/// Solves the square system `M x = b`; `None` if `M` is numerically singular.
pub fn solve_square(m: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    Lu::factor(m).map(|lu| lu.solve(b))
}
