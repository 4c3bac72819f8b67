//! Set-packing LP over the maximal cliques of a node-weighted graph.
//!
//! On a perfect graph this LP has an integral optimum equal to the
//! maximum-weight stable set, so solving it recovers the NMRF maximizer.

mod cliques;
mod simplex;

pub use cliques::{maximal_cliques, maximal_cliques_with_limit};

use crate::error::{Error, Result};
use crate::model::Assignment;
use crate::nmrf::Score;
use crate::perfection::{HoleWitness, UndirectedGraph};
use crate::pruning::NmrfInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct PackingLp {
    weights: Vec<f64>,
    rows: Vec<Vec<usize>>,
}

impl PackingLp {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Constraint rows, one maximal clique each.
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.weights.len()
    }

    /// Same constraint rows with a new objective.
    pub fn with_weights(&self, weights: &[f64]) -> Result<PackingLp> {
        check_weights(weights, self.weights.len())?;
        Ok(PackingLp {
            weights: weights.to_vec(),
            rows: self.rows.clone(),
        })
    }
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {n} vertices",
            weights.len()
        )));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter(format!("weight {i} is {w}, must be positive")));
    }
    Ok(())
}

pub fn build_lp(g: &UndirectedGraph, weights: &[f64]) -> Result<PackingLp> {
    check_weights(weights, g.n())?;
    Ok(PackingLp {
        weights: weights.to_vec(),
        rows: maximal_cliques(g)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpTolerances {
    /// Distance from 0 or 1 still counted as integral.
    pub integrality: f64,
    /// Allowed constraint violation.
    pub feasibility: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances {
            integrality: 1e-6,
            feasibility: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub integral: bool,
    /// One multiplier per constraint row; certifies optimality.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    /// Columns not within the integrality tolerance of 0 or 1.
    pub fn fractional(&self, tol: &LpTolerances) -> Vec<usize> {
        (0..self.x.len())
            .filter(|&j| !near_integer(self.x[j], tol.integrality))
            .collect()
    }

    /// Round to the nearest 0/1 vector.
    pub fn rounded(&self) -> Vec<bool> {
        self.x.iter().map(|&v| v > 0.5).collect()
    }
}

fn near_integer(v: f64, tol: f64) -> bool {
    v.abs() <= tol || (v - 1.0).abs() <= tol
}

pub fn solve_lp(lp: &PackingLp, tol: &LpTolerances) -> Result<LpSolution> {
    if !(tol.integrality > 0.0 && tol.feasibility > 0.0) {
        return Err(Error::InvalidParameter("LP tolerances must be positive".into()));
    }
    let n = lp.weights.len();
    let m = lp.rows.len();
    let max_iterations = 100 * (n + m) + 1000;
    let raw = simplex::solve_packing(&lp.weights, &lp.rows, max_iterations)?;

    let mut x = raw.x;
    for v in &mut x {
        if v.abs() <= tol.feasibility {
            *v = 0.0;
        } else if (*v - 1.0).abs() <= tol.feasibility {
            *v = 1.0;
        }
    }
    if let Some(j) = x.iter().position(|&v| v < -tol.feasibility) {
        return Err(Error::Invariant(format!("LP column {j} negative: {}", x[j])));
    }
    for (r, row) in lp.rows.iter().enumerate() {
        let s: f64 = row.iter().map(|&j| x[j]).sum();
        if s > 1.0 + tol.feasibility {
            return Err(Error::Invariant(format!("LP row {r} violated: {s}")));
        }
    }
    let objective: f64 = lp.weights.iter().zip(&x).map(|(w, v)| w * v).sum();

    // weak duality certificate: y >= 0, A^T y >= f, 1^T y = objective
    let scale = 1.0 + lp.weights.iter().fold(0.0f64, |a, &w| a.max(w));
    let cert = 1e-7 * scale;
    let mut cover = vec![0.0f64; n];
    for (row, &y) in lp.rows.iter().zip(&raw.duals) {
        if y < -cert {
            return Err(Error::Invariant(format!("negative dual {y}")));
        }
        for &j in row {
            cover[j] += y;
        }
    }
    if let Some(j) = (0..n).find(|&j| cover[j] < lp.weights[j] - cert) {
        return Err(Error::Invariant(format!("dual infeasible at column {j}")));
    }
    let bound: f64 = raw.duals.iter().sum();
    if (bound - objective).abs() > cert * (1 + m) as f64 {
        return Err(Error::Invariant(format!(
            "duality gap: primal {objective}, dual {bound}"
        )));
    }

    let integral = x.iter().all(|&v| near_integer(v, tol.integrality));
    Ok(LpSolution {
        x,
        objective,
        integral,
        duals: raw.duals,
        iterations: raw.iterations,
    })
}

/// LP result on an NMRF, decoded when integral.
#[derive(Debug, Clone, PartialEq)]
pub struct NmrfLpOutcome {
    pub solution: LpSolution,
    pub decoded: Option<DecodedLp>,
    /// Solver columns that are not integral; empty when `decoded` is set.
    pub fractional: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedLp {
    /// Bits on the base NMRF, after post-processing for pruned inputs.
    pub bits: Vec<bool>,
    pub assignment: Assignment,
    pub score: Score,
}

pub fn solve_nmrf_lp(instance: NmrfInstance<'_>, tol: &LpTolerances) -> Result<NmrfLpOutcome> {
    let (graph, weights) = instance.problem();
    let lp = build_lp(&graph, &weights)?;
    let solution = solve_lp(&lp, tol)?;
    if !solution.integral {
        let fractional = solution.fractional(tol);
        return Ok(NmrfLpOutcome {
            solution,
            decoded: None,
            fractional,
        });
    }
    let rounded = solution.rounded();
    if let Some((u, v)) = graph.first_conflict(&rounded) {
        return Err(Error::Infeasible(u, v));
    }
    let bits = instance.lift(&rounded)?;
    let base = instance.base();
    let assignment = base.decode(&bits)?;
    let score = base.objective(&bits);
    Ok(NmrfLpOutcome {
        solution,
        decoded: Some(DecodedLp {
            bits,
            assignment,
            score,
        }),
        fractional: Vec::new(),
    })
}

/// Weights that expose an odd hole (or antihole) to the LP: 1 on the
/// witness vertices, `background` elsewhere. With `background` small
/// enough the LP optimum is fractional.
pub fn odd_hole_weights(n: usize, witness: &HoleWitness, background: f64) -> Vec<f64> {
    let mut w = vec![background; n];
    for &v in &witness.cycle {
        w[v] = 1.0;
    }
    w
}
