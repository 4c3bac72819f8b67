//! Exact desk-scale solvers used as ground truth.
//!
//! Ties are broken deterministically: [`exhaustive_map`] keeps the first
//! maximizer in enumeration order (variable 0 fastest), [`exhaustive_mwss`]
//! prefers the set whose sorted vertex list is lexicographically smallest
//! (so `{0, 2}` beats `{1, 3}`).

use crate::error::{Error, Result};
use crate::limits;
use crate::model::{Assignment, GraphicalModel};
use crate::perfection::{line_graph, UndirectedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub argmax: T,
    pub value: f64,
    /// Candidates examined (assignments, or search-tree nodes).
    pub explored: u64,
}

/// Log table and the stride of each model variable in it.
type LogFactor = (Vec<f64>, Vec<(usize, usize)>);

/// Global maximizer of `sum_c log psi_c` by enumeration.
pub fn exhaustive_map(m: &GraphicalModel) -> Result<OracleResult<Assignment>> {
    let states = m.state_count();
    if states > limits::MAP_STATES && !limits::override_enabled() {
        return Err(Error::Guard {
            what: "exhaustive MAP state space",
            size: usize::try_from(states).unwrap_or(usize::MAX),
            limit: limits::MAP_STATES as usize,
        });
    }
    let cards = m.cardinalities();
    let factors: Vec<LogFactor> = m
        .factors()
        .iter()
        .map(|f| {
            let logs = f.table.iter().map(|v| v.ln()).collect();
            let mut stride = 1;
            let strides = f
                .scope
                .iter()
                .map(|&v| {
                    let s = (v, stride);
                    stride *= cards[v];
                    s
                })
                .collect();
            (logs, strides)
        })
        .collect();

    let n = cards.len();
    let mut values = vec![0usize; n];
    let mut best_value = f64::NEG_INFINITY;
    let mut best = values.clone();
    let mut explored = 0u64;
    loop {
        explored += 1;
        let score: f64 = factors
            .iter()
            .map(|(logs, strides)| {
                let idx: usize = strides.iter().map(|&(v, s)| values[v] * s).sum();
                logs[idx]
            })
            .sum();
        if score > best_value {
            best_value = score;
            best.copy_from_slice(&values);
        }
        // mixed-radix increment, variable 0 fastest
        let mut i = 0;
        loop {
            if i == n {
                return Ok(OracleResult {
                    argmax: Assignment(best),
                    value: best_value,
                    explored,
                });
            }
            values[i] += 1;
            if values[i] < cards[i] {
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

/// Maximum-weight stable set by branch and bound.
///
/// Vertices are branched in descending weight order (include first); a
/// subtree is cut when its value plus the weight of all remaining
/// candidates cannot reach the incumbent.
pub fn exhaustive_mwss(g: &UndirectedGraph, weights: &[f64]) -> Result<OracleResult<Vec<bool>>> {
    exhaustive_mwss_with_limit(g, weights, limits::MWSS_VERTICES)
}

pub fn exhaustive_mwss_with_limit(
    g: &UndirectedGraph,
    weights: &[f64],
    limit: usize,
) -> Result<OracleResult<Vec<bool>>> {
    limits::check("exhaustive MWSS", g.n(), limit)?;
    if weights.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} vertices",
            weights.len(),
            g.n()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite weight {w}")));
    }
    let adj = g.masks()?;
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    let mut search = Mwss {
        adj: &adj,
        weights,
        order: &order,
        best_mask: 0,
        best_value: canonical_value(0, weights),
        explored: 0,
    };
    let all = if n == 0 { 0 } else { u128::MAX >> (128 - n) };
    search.branch(all, 0, 0.0);
    let argmax = (0..n).map(|v| search.best_mask >> v & 1 == 1).collect();
    Ok(OracleResult {
        argmax,
        value: search.best_value,
        explored: search.explored,
    })
}

struct Mwss<'a> {
    adj: &'a [u128],
    weights: &'a [f64],
    order: &'a [usize],
    best_mask: u128,
    best_value: f64,
    explored: u64,
}

impl Mwss<'_> {
    fn branch(&mut self, candidates: u128, chosen: u128, value: f64) {
        self.explored += 1;
        let Some(&v) = self.order.iter().find(|&&v| candidates >> v & 1 == 1) else {
            let exact = canonical_value(chosen, self.weights);
            if exact > self.best_value || (exact == self.best_value && lex_preferred(chosen, self.best_mask)) {
                self.best_value = exact;
                self.best_mask = chosen;
            }
            return;
        };
        let bound: f64 = value + mask_weight(candidates, self.weights);
        let slack = 1e-9 * (1.0 + self.best_value.abs());
        if bound < self.best_value - slack {
            return;
        }
        let bit = 1u128 << v;
        self.branch(candidates & !bit & !self.adj[v], chosen | bit, value + self.weights[v]);
        self.branch(candidates & !bit, chosen, value);
    }
}

fn mask_weight(mask: u128, weights: &[f64]) -> f64 {
    let mut m = mask;
    let mut total = 0.0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        total += weights[v].max(0.0);
        m &= m - 1;
    }
    total
}

/// Sum in ascending vertex order, so equal sets always get equal values.
fn canonical_value(mask: u128, weights: &[f64]) -> f64 {
    let mut m = mask;
    let mut total = 0.0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        total += weights[v];
        m &= m - 1;
    }
    total
}

/// `a` wins when the lowest vertex on which the sets differ belongs to `a`.
fn lex_preferred(a: u128, b: u128) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Maximum-weight matching as a stable set in the line graph. `edge_weights`
/// follows the order of `g.edges()`.
pub fn exhaustive_matching(g: &UndirectedGraph, edge_weights: &[f64]) -> Result<OracleResult<Vec<(usize, usize)>>> {
    limits::check("exhaustive matching edges", g.edge_count(), limits::MATCHING_EDGES)?;
    let (lg, edges) = line_graph(g);
    if edge_weights.len() != edges.len() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} edges",
            edge_weights.len(),
            edges.len()
        )));
    }
    let res = exhaustive_mwss(&lg, edge_weights)?;
    let matching = res
        .argmax
        .iter()
        .zip(&edges)
        .filter(|(&b, _)| b)
        .map(|(_, &e)| e)
        .collect();
    Ok(OracleResult {
        argmax: matching,
        value: res.value,
        explored: res.explored,
    })
}
