//! Dense tableau simplex for `max f.x  s.t.  A x <= 1, x >= 0` with a 0/1
//! matrix `A`. The origin is feasible, so the slack basis starts phase II
//! directly. Pivoting follows Bland's rule: the lowest-index improving
//! column enters, and among minimum-ratio rows the one whose basic variable
//! has the lowest index leaves.

use crate::error::{Error, Result};

/// Reduced costs above this are treated as improving.
const OPTIMALITY_TOL: f64 = 1e-9;
/// Pivot elements below this are treated as zero.
const PIVOT_TOL: f64 = 1e-9;
/// Entries below this are flushed to zero after each pivot.
const ZERO_TOL: f64 = 1e-13;

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    pub iterations: usize,
}

/// `rows[i]` lists the columns with coefficient 1 in constraint `i`.
pub(crate) fn solve_packing(weights: &[f64], rows: &[Vec<usize>], max_iterations: usize) -> Result<SimplexResult> {
    let n = weights.len();
    let m = rows.len();
    let width = n + m + 1; // structural, slack, rhs
    let mut tab = vec![0.0f64; m * width];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            tab[i * width + j] = 1.0;
        }
        tab[i * width + n + i] = 1.0;
        tab[i * width + n + m] = 1.0;
    }
    // reduced costs c_j - z_j; last entry holds -objective
    let mut cost = vec![0.0f64; width];
    cost[..n].copy_from_slice(weights);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut iterations = 0;
    while let Some(enter) = (0..n + m).find(|&j| cost[j] > OPTIMALITY_TOL) {
        if iterations >= max_iterations {
            return Err(Error::IterationLimit(max_iterations));
        }
        iterations += 1;

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = tab[i * width + enter];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = tab[i * width + n + m] / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((r, best)) => {
                    if ratio < best - 1e-12 || ((ratio - best).abs() <= 1e-12 && basis[i] < basis[r]) {
                        Some((i, ratio))
                    } else {
                        Some((r, best))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return Err(Error::Invariant(format!("packing LP unbounded in column {enter}")));
        };
        pivot(&mut tab, &mut cost, width, m, row, enter);
        basis[row] = enter;
    }

    let mut x = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i * width + n + m];
        }
    }
    // dual of row i is minus the reduced cost of its slack
    let duals = (0..m).map(|i| -cost[n + i]).collect();
    Ok(SimplexResult { x, duals, iterations })
}

fn pivot(tab: &mut [f64], cost: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = tab[row * width + col];
    for v in &mut tab[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = tab[row * width..(row + 1) * width].to_vec();
    for i in 0..m {
        if i == row {
            continue;
        }
        let factor = tab[i * width + col];
        if factor == 0.0 {
            continue;
        }
        let r = &mut tab[i * width..(i + 1) * width];
        for (v, &pv) in r.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
            if v.abs() < ZERO_TOL {
                *v = 0.0;
            }
        }
        r[col] = 0.0;
    }
    let factor = cost[col];
    for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
        *v -= factor * pv;
        if v.abs() < ZERO_TOL {
            *v = 0.0;
        }
    }
    cost[col] = 0.0;
}
