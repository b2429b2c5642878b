//! Dense dual simplex for covering LPs.
//!
//! Solves `min cᵀx  s.t.  A x ≥ b,  x ≥ 0` with `c ≥ 0`. The all-slack basis
//! is then dual feasible, so the dual simplex method applies directly
//! without a phase-one. Bland's rule (lowest index) picks both the leaving
//! row and the entering column, which rules out cycling.

use crate::error::{Error, Result};

pub const MAX_PIVOTS: usize = 1_000_000;

/// Optimal primal and dual solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Multipliers of the `A x ≥ b` rows (`y ≥ 0`, `Aᵀy ≤ c`).
    pub y: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub pivots: usize,
}

/// Solves the covering LP. `a` is row-major with `b.len()` rows.
pub fn solve_covering(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = b.len();
    let n = c.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Precondition("constraint matrix shape does not match b and c".into()));
    }
    if c.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::Precondition("dual simplex start needs c >= 0".into()));
    }
    let width = n + m;
    // Rows: −A x + s = −b. Columns 0..n are x, n..n+m are s.
    let mut t = vec![vec![0.0; width + 1]; m];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = -a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width] = -b[i];
    }
    let mut cost: Vec<f64> = c.iter().copied().chain(std::iter::repeat_n(0.0, m)).collect();
    let mut basis: Vec<usize> = (n..width).collect();

    let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let feas_tol = 1e-11 * scale;
    let piv_tol = 1e-12;

    let mut pivots = 0;
    while let Some(r) = (0..m).filter(|&i| t[i][width] < -feas_tol).min_by_key(|&i| basis[i]) {
        if pivots >= MAX_PIVOTS {
            return Err(Error::SolverFailure(format!("simplex hit the {MAX_PIVOTS}-pivot cap")));
        }
        // ratio test over columns with a negative entry in row r
        let mut enter: Option<(usize, f64)> = None;
        for j in 0..width {
            let arj = t[r][j];
            if arj < -piv_tol {
                let ratio = cost[j].max(0.0) / -arj;
                match enter {
                    Some((_, best)) if ratio >= best - 1e-15 * best.abs().max(1.0) => {}
                    _ => enter = Some((j, ratio)),
                }
            }
        }
        let Some((e, _)) = enter else {
            return Err(Error::Infeasible(format!("covering row {r} cannot be satisfied")));
        };
        pivot(&mut t, &mut cost, r, e);
        basis[r] = e;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width].max(0.0);
        }
    }
    let y: Vec<f64> = (0..m).map(|i| cost[n + i].max(0.0)).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let dual_objective = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
    Ok(LpSolution { x, y, objective, dual_objective, pivots })
}

fn pivot(t: &mut [Vec<f64>], cost: &mut [f64], r: usize, e: usize) {
    let p = t[r][e];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let row = t[r].clone();
    for (i, ti) in t.iter_mut().enumerate() {
        if i != r {
            let f = ti[e];
            if f != 0.0 {
                for (v, rv) in ti.iter_mut().zip(&row) {
                    *v -= f * rv;
                }
                ti[e] = 0.0;
            }
        }
    }
    let f = cost[e];
    if f != 0.0 {
        let len = cost.len();
        for (v, rv) in cost.iter_mut().zip(&row[..len]) {
            *v -= f * rv;
        }
        cost[e] = 0.0;
    }
}
