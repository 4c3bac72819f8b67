//! Conversion of a rescaled graphical model into its nand Markov random
//! field (NMRF), and the maps between model assignments and NMRF bit
//! vectors.
//!
//! Each clique `c` with `K_c = prod |x_i|` configurations contributes nodes
//! `(c, 1) .. (c, K_c)` weighted by `log psi_c`. Two nodes are joined by a
//! nand edge exactly when their configurations disagree on a shared
//! variable; distinct configurations of one clique always disagree, so each
//! clique's nodes form a complete subgraph.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{Assignment, GraphicalModel};
use crate::perfection::{write_ug, UndirectedGraph};

/// 1-based configuration index of `values` (one setting per scope variable),
/// lowest-index scope variable fastest.
pub fn config_index(scope: &[usize], cards: &[usize], values: &[usize]) -> Result<usize> {
    if values.len() != scope.len() {
        return Err(Error::InvalidAssignment(format!(
            "{} settings for a scope of {} variables",
            values.len(),
            scope.len()
        )));
    }
    let mut k = 0;
    let mut stride = 1;
    for (&var, &x) in scope.iter().zip(values) {
        let card = cards[var];
        if x >= card {
            return Err(Error::InvalidAssignment(format!(
                "variable {var} setting {x} out of range (cardinality {card})"
            )));
        }
        k += x * stride;
        stride *= card;
    }
    Ok(k + 1)
}

/// Inverse of [`config_index`].
pub fn decode_config(scope: &[usize], cards: &[usize], k: usize) -> Result<Vec<usize>> {
    let total: usize = scope.iter().map(|&v| cards[v]).product();
    if k == 0 || k > total {
        return Err(Error::InvalidAssignment(format!(
            "configuration index {k} out of range 1..={total}"
        )));
    }
    let mut rest = k - 1;
    Ok(scope
        .iter()
        .map(|&var| {
            let x = rest % cards[var];
            rest /= cards[var];
            x
        })
        .collect())
}

/// `true` iff configurations `(c, k)` and `(d, l)` set some shared variable
/// differently. Disjoint scopes never disagree.
pub fn disagreement(c_scope: &[usize], c_k: usize, d_scope: &[usize], d_l: usize, cards: &[usize]) -> Result<bool> {
    let cv = decode_config(c_scope, cards, c_k)?;
    let dv = decode_config(d_scope, cards, d_l)?;
    Ok(settings_disagree(c_scope, &cv, d_scope, &dv))
}

fn settings_disagree(c_scope: &[usize], cv: &[usize], d_scope: &[usize], dv: &[usize]) -> bool {
    // both scopes are strictly increasing: merge walk
    let (mut i, mut j) = (0, 0);
    while i < c_scope.len() && j < d_scope.len() {
        match c_scope[i].cmp(&d_scope[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if cv[i] != dv[j] {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// Log-domain objective value; `Infeasible` stands for `-inf` (a violated
/// nand constraint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Finite(f64),
    Infeasible,
}

impl Score {
    pub fn value(self) -> f64 {
        match self {
            Score::Finite(v) => v,
            Score::Infeasible => f64::NEG_INFINITY,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Score::Finite(_))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Finite(v) => write!(f, "{v}"),
            Score::Infeasible => f.write_str("-inf"),
        }
    }
}

/// Sum of weights over asserted vertices, or `Infeasible` when two asserted
/// vertices are adjacent.
pub fn stable_set_score(graph: &UndirectedGraph, weights: &[f64], bits: &[bool]) -> Score {
    assert_eq!(bits.len(), graph.n(), "bit vector length");
    if graph.first_conflict(bits).is_some() {
        return Score::Infeasible;
    }
    Score::Finite(weights.iter().zip(bits).filter(|(_, &b)| b).map(|(w, _)| w).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmrfNode {
    pub clique: usize,
    /// 1-based configuration index.
    pub config: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nmrf {
    nodes: Vec<NmrfNode>,
    graph: UndirectedGraph,
    clique_offsets: Vec<Range<usize>>,
    scopes: Vec<Vec<usize>>,
    cards: Vec<usize>,
}

/// Build the NMRF of a rescaled model (every table entry > 1).
pub fn build_nmrf(m: &GraphicalModel) -> Result<Nmrf> {
    let cards = m.cardinalities().to_vec();
    let mut nodes = Vec::new();
    let mut clique_offsets = Vec::with_capacity(m.factors().len());
    let mut settings: Vec<Vec<usize>> = Vec::new();
    for (c, f) in m.factors().iter().enumerate() {
        let start = nodes.len();
        for (entry, &psi) in f.table.iter().enumerate() {
            let weight = psi.ln();
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NotRescaled {
                    factor: c,
                    entry,
                    log_weight: weight,
                });
            }
            settings.push(decode_config(&f.scope, &cards, entry + 1)?);
            nodes.push(NmrfNode {
                clique: c,
                config: entry + 1,
                weight,
            });
        }
        clique_offsets.push(start..nodes.len());
    }
    let scopes: Vec<Vec<usize>> = m.factors().iter().map(|f| f.scope.clone()).collect();
    let mut graph = UndirectedGraph::empty(nodes.len());
    for c in 0..scopes.len() {
        for d in c..scopes.len() {
            if c != d && !scopes[c].iter().any(|v| scopes[d].contains(v)) {
                continue;
            }
            for a in clique_offsets[c].clone() {
                let lo = if c == d { a + 1 } else { clique_offsets[d].start };
                for b in lo..clique_offsets[d].end {
                    if settings_disagree(&scopes[c], &settings[a], &scopes[d], &settings[b]) {
                        graph.add_edge(a, b);
                    }
                }
            }
        }
    }
    Ok(Nmrf {
        nodes,
        graph,
        clique_offsets,
        scopes,
        cards,
    })
}

impl Nmrf {
    pub fn nodes(&self) -> &[NmrfNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn num_cliques(&self) -> usize {
        self.clique_offsets.len()
    }

    pub fn clique_range(&self, c: usize) -> Range<usize> {
        self.clique_offsets[c].clone()
    }

    pub fn scope(&self, c: usize) -> &[usize] {
        &self.scopes[c]
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    /// Node index of `(clique, k)`.
    pub fn node_index(&self, clique: usize, k: usize) -> usize {
        let r = &self.clique_offsets[clique];
        assert!(k >= 1 && r.start + k - 1 < r.end, "configuration {k} out of range");
        r.start + k - 1
    }

    /// One bit per clique, at the configuration `a` induces.
    pub fn encode(&self, a: &Assignment) -> Result<Vec<bool>> {
        if a.0.len() != self.cards.len() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} values, got {}",
                self.cards.len(),
                a.0.len()
            )));
        }
        let mut bits = vec![false; self.len()];
        for (c, scope) in self.scopes.iter().enumerate() {
            let values: Vec<usize> = scope.iter().map(|&v| a.0[v]).collect();
            let k = config_index(scope, &self.cards, &values)?;
            bits[self.node_index(c, k)] = true;
        }
        Ok(bits)
    }

    /// Recover the model assignment from a setting with exactly one bit per
    /// clique and agreeing shared variables. Variables outside every clique
    /// decode to 0.
    pub fn decode(&self, bits: &[bool]) -> Result<Assignment> {
        if bits.len() != self.len() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} bits, got {}",
                self.len(),
                bits.len()
            )));
        }
        let mut values: Vec<Option<usize>> = vec![None; self.cards.len()];
        for (c, range) in self.clique_offsets.iter().enumerate() {
            let set: Vec<usize> = range.clone().filter(|&i| bits[i]).collect();
            if set.len() != 1 {
                return Err(Error::CliqueBits {
                    clique: c,
                    count: set.len(),
                });
            }
            let k = self.nodes[set[0]].config;
            let settings = decode_config(&self.scopes[c], &self.cards, k)?;
            for (&var, x) in self.scopes[c].iter().zip(settings) {
                match values[var] {
                    Some(prev) if prev != x => {
                        return Err(Error::ConflictingVariable {
                            variable: var,
                            first: prev,
                            second: x,
                        })
                    }
                    _ => values[var] = Some(x),
                }
            }
        }
        Ok(Assignment(values.into_iter().map(|v| v.unwrap_or(0)).collect()))
    }

    /// `sum f_{c,k} x_{c,k}` when every nand constraint holds.
    pub fn objective(&self, bits: &[bool]) -> Score {
        stable_set_score(&self.graph, &self.weights(), bits)
    }

    /// UG text with one `# node <idx> clique <c> k <k>` comment per node.
    pub fn to_ug(&self) -> String {
        let comments: Vec<String> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| format!("node {i} clique {} k {}", n.clique, n.config))
            .collect();
        write_ug(&self.graph, Some(&self.weights()), Some(&comments))
    }
}

pub fn nmrf_objective(nmrf: &Nmrf, bits: &[bool]) -> Score {
    nmrf.objective(bits)
}
