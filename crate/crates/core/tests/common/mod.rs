//! Independent reference computations shared by the integration tests.
//! Nothing here calls the LP solver.
#![allow(dead_code)]

use l1lab::DenseMatrix;

/// Solves the square system `m x = b` by Gaussian elimination with partial
/// pivoting; `None` when a pivot falls below `1e-12` times the largest entry.
pub fn gauss_solve(m: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    let mut aug: Vec<Vec<f64>> = m.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))?;
        if aug[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        aug.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                if f != 0.0 {
                    let pivot = aug[col].clone();
                    for (dst, src) in aug[r][col..=n].iter_mut().zip(&pivot[col..=n]) {
                        *dst -= f * src;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| aug[i][n] / aug[i][i]).collect())
}

/// Calls `visit` on every increasing `k`-subset of `0..n`.
pub fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), visit);
}

/// Minimum of `‖x‖₁` over `A x = y` by enumerating basic solutions: every
/// vertex of the split-variable feasible set is supported on `m` linearly
/// independent columns.
pub fn l1_by_enumeration(a: &DenseMatrix, y: &[f64]) -> f64 {
    let (m, n) = (a.rows(), a.cols());
    let mut best = f64::INFINITY;
    for_each_subset(n, m, &mut |s| {
        let sub: Vec<Vec<f64>> = (0..m).map(|i| s.iter().map(|&j| a[(i, j)]).collect()).collect();
        if let Some(x) = gauss_solve(&sub, y) {
            best = best.min(x.iter().map(|v| v.abs()).sum());
        }
    });
    best
}

/// Orthonormal null-space basis built from the reduced row echelon form.
pub fn rref_null_space(a: &DenseMatrix) -> Vec<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.to_rows();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let piv = (row..m).max_by(|&i, &j| r[i][col].abs().total_cmp(&r[j][col].abs())).unwrap();
        if r[piv][col].abs() < 1e-12 {
            continue;
        }
        r.swap(row, piv);
        let p = r[row][col];
        for v in r[row].iter_mut() {
            *v /= p;
        }
        for i in 0..m {
            if i != row {
                let f = r[i][col];
                if f != 0.0 {
                    let pivot = r[row].clone();
                    for (dst, src) in r[i].iter_mut().zip(&pivot) {
                        *dst -= f * src;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let raw: Vec<Vec<f64>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f];
            }
            v
        })
        .collect();
    gram_schmidt(raw)
}

fn gram_schmidt(mut vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for i in 0..vs.len() {
        // Two passes keep the basis orthonormal to working precision.
        for _ in 0..2 {
            for j in 0..i {
                let proj: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                let vj = vs[j].clone();
                for (a, b) in vs[i].iter_mut().zip(&vj) {
                    *a -= proj * b;
                }
            }
        }
        let norm = vs[i].iter().map(|a| a * a).sum::<f64>().sqrt();
        for a in vs[i].iter_mut() {
            *a /= norm;
        }
    }
    vs
}

fn combine(basis: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    let n = basis[0].len();
    let mut w = vec![0.0; n];
    for (b, &zi) in basis.iter().zip(z) {
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi += zi * bi;
        }
    }
    w
}

/// Direction grid on the unit sphere of `R^d`, `d <= 3`, covering one
/// hemisphere (the objectives used here are even).
fn sphere_grid(d: usize, points: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0]],
        2 => (0..points)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / points as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..points)
                .map(|i| {
                    let z = 1.0 - (i as f64 + 0.5) / points as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => panic!("grid search supports null-space dimension at most 3"),
    }
}

/// Best value of `score` over a sphere grid, refined by coordinate-wise
/// local search; the result is always attained by some direction.
fn grid_optimize(d: usize, score: &dyn Fn(&[f64]) -> f64) -> f64 {
    let grid = sphere_grid(d, if d == 3 { 60_000 } else { 20_000 });
    let mut best_z = grid[0].clone();
    let mut best = f64::NEG_INFINITY;
    for z in &grid {
        let s = score(z);
        if s > best {
            best = s;
            best_z = z.clone();
        }
    }
    // Pattern search along the grid's own nearby directions, which handles
    // the kinks of piecewise-linear objectives better than axis steps.
    let dirs = sphere_grid(d, 64);
    let mut step = 0.02;
    while step > 1e-10 {
        let mut improved = false;
        for dir in &dirs {
            for sign in [-1.0, 1.0] {
                let z: Vec<f64> = best_z.iter().zip(dir).map(|(b, e)| b + sign * step * e).collect();
                let s = score(&z);
                if s > best {
                    best = s;
                    best_z = z;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Lower estimate of `max ‖w_K‖₁ / ‖w_K̄‖₁` over the null space of `a`.
pub fn kappa_grid(a: &DenseMatrix, set: &[usize]) -> f64 {
    let basis = rref_null_space(a);
    let score = |z: &[f64]| {
        let w = combine(&basis, z);
        let (mut inside, mut outside) = (0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            if set.contains(&i) {
                inside += wi.abs();
            } else {
                outside += wi.abs();
            }
        }
        if outside == 0.0 {
            if inside == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            inside / outside
        }
    };
    grid_optimize(basis.len(), &score)
}

/// Upper estimate of `min ‖d_K̄‖₁` over null vectors with
/// `Σ_K sign(xᵢ) dᵢ = -1`.
pub fn critical_c_grid(a: &DenseMatrix, set: &[usize], x_k: &[f64]) -> f64 {
    let basis = rref_null_space(a);
    let score = |z: &[f64]| {
        let w = combine(&basis, z);
        let mut descent = 0.0;
        let mut outside = 0.0;
        for (i, wi) in w.iter().enumerate() {
            match set.iter().position(|&k| k == i) {
                Some(p) => descent += x_k[p].signum() * wi,
                None => outside += wi.abs(),
            }
        }
        // Even in z: use whichever sign of the direction decreases ‖x_K‖₁.
        let descent = descent.abs();
        if descent == 0.0 { f64::NEG_INFINITY } else { -outside / descent }
    };
    -grid_optimize(basis.len(), &score)
}
