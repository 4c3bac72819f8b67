//! Convergent max-sum message passing on a nand graph.
//!
//! Each edge `ij` carries the pairwise table
//! `theta(0,0)=0, theta(0,1)=f_j/deg j, theta(1,0)=f_i/deg i,
//! theta(1,1)=neg_large`, so over a stable set the tables sum to the stable
//! set's weight. Messages `m_{j->i}(x_i)` are updated per edge by
//!
//! ```text
//! m_{j->i}(x_i) = -1/2 sum_{k in N(i)\j} m_{k->i}(x_i)
//!                 + 1/2 max_{x_j} [ sum_{k in N(j)\i} m_{k->j}(x_j) + theta(x_i, x_j) ]
//! ```
//!
//! and vertex `i` decodes to the argmax of `sum_j m_{j->i}`, preferring 0.

use crate::error::{Error, Result};
use crate::nmrf::{stable_set_score, Score};
use crate::perfection::UndirectedGraph;

/// Multiplier in the default `neg_large = -(1e6 * (1 + max f))`.
pub const NEG_LARGE_SCALE: f64 = 1e6;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

pub fn default_neg_large(weights: &[f64]) -> f64 {
    let max = weights.iter().copied().fold(0.0f64, f64::max);
    -(NEG_LARGE_SCALE * (1.0 + max))
}

/// Default sweep budget `10 * N * |E|`.
pub fn default_max_iters(graph: &UndirectedGraph) -> usize {
    10 * graph.n() * graph.edge_count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwisePotential {
    /// Edges `(i, j)` with `i < j`, sorted.
    edges: Vec<(usize, usize)>,
    /// `theta[e][x_i][x_j]`.
    theta: Vec<[[f64; 2]; 2]>,
    weights: Vec<f64>,
    /// Per vertex, `(edge, slot)` of every incoming message.
    incoming: Vec<Vec<(usize, usize)>>,
}

impl PairwisePotential {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn theta(&self, edge: usize) -> [[f64; 2]; 2] {
        self.theta[edge]
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    /// Sum of edge tables at a bit vector.
    pub fn total(&self, bits: &[bool]) -> f64 {
        self.edges
            .iter()
            .zip(&self.theta)
            .map(|(&(i, j), t)| t[bits[i] as usize][bits[j] as usize])
            .sum()
    }
}

pub fn build_potentials(graph: &UndirectedGraph, weights: &[f64], neg_large: f64) -> PairwisePotential {
    assert_eq!(weights.len(), graph.n(), "weight count");
    let edges = graph.edges();
    let mut incoming = vec![Vec::new(); graph.n()];
    let theta = edges
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| {
            // slot 0 holds j -> i, slot 1 holds i -> j
            incoming[i].push((e, 0));
            incoming[j].push((e, 1));
            let a = weights[i] / graph.degree(i) as f64;
            let b = weights[j] / graph.degree(j) as f64;
            [[0.0, b], [a, neg_large]]
        })
        .collect();
    PairwisePotential {
        edges,
        theta,
        weights: weights.to_vec(),
        incoming,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpState {
    /// `lambda[e][0]` is the message from `j` to `i` over `x_i`,
    /// `lambda[e][1]` the message from `i` to `j` over `x_j`, for edge
    /// `e = (i, j)`.
    pub lambda: Vec<[[f64; 2]; 2]>,
    pub iteration: usize,
    pub residual: f64,
}

impl MpState {
    pub fn zeros(potentials: &PairwisePotential) -> Self {
        MpState {
            lambda: vec![[[0.0; 2]; 2]; potentials.edges.len()],
            iteration: 0,
            residual: 0.0,
        }
    }
}

/// Order of edge updates within a sweep. Both have the same fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Edges in sorted order, each reading the latest messages.
    #[default]
    Sequential,
    /// Every edge reads the messages from before the sweep.
    Parallel,
}

fn incoming_sum(potentials: &PairwisePotential, lambda: &[[[f64; 2]; 2]], v: usize, skip: usize) -> [f64; 2] {
    let mut s = [0.0; 2];
    for &(e, slot) in &potentials.incoming[v] {
        if e != skip {
            s[0] += lambda[e][slot][0];
            s[1] += lambda[e][slot][1];
        }
    }
    s
}

fn edge_update(potentials: &PairwisePotential, lambda: &[[[f64; 2]; 2]], e: usize) -> [[f64; 2]; 2] {
    let (i, j) = potentials.edges[e];
    let t = &potentials.theta[e];
    let a_i = incoming_sum(potentials, lambda, i, e);
    let a_j = incoming_sum(potentials, lambda, j, e);
    let mut to_i = [0.0; 2];
    let mut to_j = [0.0; 2];
    for x in 0..2 {
        to_i[x] = -0.5 * a_i[x] + 0.5 * (a_j[0] + t[x][0]).max(a_j[1] + t[x][1]);
        to_j[x] = -0.5 * a_j[x] + 0.5 * (a_i[0] + t[0][x]).max(a_i[1] + t[1][x]);
    }
    [to_i, to_j]
}

/// One sweep over all edges.
pub fn mp_iterate(state: &MpState, potentials: &PairwisePotential, schedule: Schedule) -> Result<MpState> {
    if state.lambda.len() != potentials.edges.len() {
        return Err(Error::InvalidParameter(format!(
            "state has {} edges, potentials {}",
            state.lambda.len(),
            potentials.edges.len()
        )));
    }
    let mut next = state.lambda.clone();
    let mut residual = 0.0f64;
    for e in 0..potentials.edges.len() {
        let source = match schedule {
            Schedule::Sequential => &next,
            Schedule::Parallel => &state.lambda,
        };
        let msg = edge_update(potentials, source, e);
        if msg.iter().flatten().any(|v| !v.is_finite()) {
            let (i, j) = potentials.edges[e];
            return Err(Error::NonFiniteMessage(i, j));
        }
        for (new, old) in msg.iter().flatten().zip(state.lambda[e].iter().flatten()) {
            residual = residual.max((new - old).abs());
        }
        next[e] = msg;
    }
    Ok(MpState {
        lambda: next,
        iteration: state.iteration + 1,
        residual,
    })
}

/// Per-vertex beliefs `(b(0), b(1))`. Isolated vertices get `(0, f_i)`.
pub fn mp_beliefs(state: &MpState, potentials: &PairwisePotential) -> Vec<[f64; 2]> {
    (0..potentials.num_vertices())
        .map(|v| {
            if potentials.incoming[v].is_empty() {
                [0.0, potentials.weights[v]]
            } else {
                incoming_sum(potentials, &state.lambda, v, usize::MAX)
            }
        })
        .collect()
}

/// Argmax per vertex; ties go to 0.
pub fn decode_beliefs(beliefs: &[[f64; 2]]) -> Vec<bool> {
    beliefs.iter().map(|b| b[1] > b[0]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpConfig {
    pub tol: f64,
    /// `None` means `10 * N * |E|`.
    pub max_iters: Option<usize>,
    /// `None` means `-(1e6 * (1 + max f))`.
    pub neg_large: Option<f64>,
    pub schedule: Schedule,
}

impl Default for MpConfig {
    fn default() -> Self {
        MpConfig {
            tol: DEFAULT_TOLERANCE,
            max_iters: None,
            neg_large: None,
            schedule: Schedule::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpResult {
    pub bits: Vec<bool>,
    /// `Infeasible` when the decoded bits violate a nand edge.
    pub objective: Score,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub beliefs: Vec<[f64; 2]>,
}

pub fn mp_solve(graph: &UndirectedGraph, weights: &[f64], cfg: &MpConfig) -> Result<MpResult> {
    if weights.len() != graph.n() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} vertices",
            weights.len(),
            graph.n()
        )));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter(format!("weight {i} is {w}, must be positive")));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance {} must be positive",
            cfg.tol
        )));
    }
    let neg_large = cfg.neg_large.unwrap_or_else(|| default_neg_large(weights));
    if !(neg_large < 0.0 && neg_large.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "neg_large {neg_large} must be finite and negative"
        )));
    }
    let max_iters = cfg.max_iters.unwrap_or_else(|| default_max_iters(graph));
    let potentials = build_potentials(graph, weights, neg_large);
    let mut state = MpState::zeros(&potentials);
    let mut converged = potentials.edges.is_empty();
    while !converged && state.iteration < max_iters {
        state = mp_iterate(&state, &potentials, cfg.schedule)?;
        converged = state.residual < cfg.tol;
    }
    let beliefs = mp_beliefs(&state, &potentials);
    let bits = decode_beliefs(&beliefs);
    let objective = stable_set_score(graph, weights, &bits);
    Ok(MpResult {
        bits,
        objective,
        iterations: state.iteration,
        converged,
        residual: state.residual,
        beliefs,
    })
}
