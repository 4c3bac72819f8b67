//! NMRF simplification: DISCONNECT strips the intra-clique edges of minimal
//! configurations, MERGE fuses non-adjacent twins. Solutions on the pruned
//! graph are mapped back by [`postprocess_assignment`].

use crate::error::{Error, Result};
use crate::nmrf::Nmrf;
use crate::perfection::UndirectedGraph;

/// Absolute tolerance when comparing a weight against `log(1 + epsilon)`.
pub const MINIMAL_TOLERANCE: f64 = 1e-12;

/// Result of fusing false twins in a weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinMerge {
    /// Same vertex numbering as the input; merged-away vertices are isolated.
    pub graph: UndirectedGraph,
    pub merge_map: Vec<usize>,
    /// Accumulated weight on representatives, 0 on merged-away vertices.
    pub weights: Vec<f64>,
}

impl TwinMerge {
    pub fn representatives(&self) -> Vec<usize> {
        (0..self.merge_map.len()).filter(|&v| self.merge_map[v] == v).collect()
    }

    /// Graph and weights restricted to the representatives (in ascending order).
    pub fn reduced(&self) -> (UndirectedGraph, Vec<f64>) {
        let reps = self.representatives();
        let w = reps.iter().map(|&v| self.weights[v]).collect();
        (self.graph.induced(&reps), w)
    }

    /// Copy each representative's bit onto every vertex it absorbed.
    pub fn expand(&self, reduced_bits: &[bool]) -> Result<Vec<bool>> {
        let reps = self.representatives();
        if reduced_bits.len() != reps.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} bits on the merged graph, got {}",
                reps.len(),
                reduced_bits.len()
            )));
        }
        let mut position = vec![usize::MAX; self.merge_map.len()];
        for (i, &r) in reps.iter().enumerate() {
            position[r] = i;
        }
        Ok(self.merge_map.iter().map(|&r| reduced_bits[position[r]]).collect())
    }
}

/// Repeatedly merge the first (in ascending index order) pair of
/// non-adjacent vertices with identical neighbourhoods into the lower one,
/// summing weights, until no pair remains.
pub fn merge_twins(graph: &UndirectedGraph, weights: &[f64]) -> TwinMerge {
    assert_eq!(graph.n(), weights.len(), "weight count");
    let n = graph.n();
    let mut g = graph.clone();
    let mut merge_map: Vec<usize> = (0..n).collect();
    let mut w = weights.to_vec();
    let mut active = vec![true; n];
    'scan: loop {
        for u in 0..n {
            if !active[u] {
                continue;
            }
            for v in u + 1..n {
                if !active[v] || g.has_edge(u, v) || g.row(u) != g.row(v) {
                    continue;
                }
                for x in g.neighbors(v).to_vec() {
                    g.remove_edge(v, x);
                }
                for r in merge_map.iter_mut() {
                    if *r == v {
                        *r = u;
                    }
                }
                w[u] += w[v];
                w[v] = 0.0;
                active[v] = false;
                continue 'scan;
            }
        }
        break;
    }
    TwinMerge {
        graph: g,
        merge_map,
        weights: w,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrunedNmrf {
    pub base: Nmrf,
    pub graph: UndirectedGraph,
    pub merge_map: Vec<usize>,
    pub weights: Vec<f64>,
    pub minimal_flags: Vec<bool>,
}

impl PrunedNmrf {
    fn twin_view(&self) -> TwinMerge {
        TwinMerge {
            graph: self.graph.clone(),
            merge_map: self.merge_map.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.twin_view().representatives()
    }

    /// The graph the solvers see: representatives only.
    pub fn reduced(&self) -> (UndirectedGraph, Vec<f64>) {
        self.twin_view().reduced()
    }
}

/// Remove every intra-clique edge touching a minimal configuration, i.e. a
/// node whose weight equals `log(1 + epsilon)`.
pub fn disconnect(nmrf: &Nmrf, epsilon: f64) -> PrunedNmrf {
    let floor = epsilon.ln_1p();
    let minimal_flags: Vec<bool> = nmrf
        .nodes()
        .iter()
        .map(|n| (n.weight - floor).abs() <= MINIMAL_TOLERANCE)
        .collect();
    let mut graph = nmrf.graph().clone();
    for c in 0..nmrf.num_cliques() {
        let range = nmrf.clique_range(c);
        for a in range.clone() {
            if !minimal_flags[a] {
                continue;
            }
            for b in range.clone() {
                if b != a {
                    graph.remove_edge(a, b);
                }
            }
        }
    }
    PrunedNmrf {
        base: nmrf.clone(),
        graph,
        merge_map: (0..nmrf.len()).collect(),
        weights: nmrf.weights(),
        minimal_flags,
    }
}

/// No edges removed; used when MERGE is applied to a raw NMRF.
pub fn unpruned(nmrf: &Nmrf) -> PrunedNmrf {
    PrunedNmrf {
        base: nmrf.clone(),
        graph: nmrf.graph().clone(),
        merge_map: (0..nmrf.len()).collect(),
        weights: nmrf.weights(),
        minimal_flags: vec![false; nmrf.len()],
    }
}

pub fn merge(pruned: &PrunedNmrf) -> PrunedNmrf {
    let reps = pruned.representatives();
    let (reduced, w) = pruned.reduced();
    let twins = merge_twins(&reduced, &w);
    // lift back to base numbering
    let mut graph = UndirectedGraph::empty(pruned.base.len());
    let mut weights = vec![0.0; pruned.base.len()];
    for (i, &r) in reps.iter().enumerate() {
        if twins.merge_map[i] == i {
            weights[r] = twins.weights[i];
        }
    }
    for (a, b) in twins.graph.edges() {
        graph.add_edge(reps[a], reps[b]);
    }
    let merge_map = pruned
        .merge_map
        .iter()
        .map(|&r| {
            let i = reps.binary_search(&r).expect("representative");
            reps[twins.merge_map[i]]
        })
        .collect();
    PrunedNmrf {
        base: pruned.base.clone(),
        graph,
        merge_map,
        weights,
        minimal_flags: pruned.minimal_flags.clone(),
    }
}

/// `MERGE(DISCONNECT(nmrf))`.
pub fn prune(nmrf: &Nmrf, epsilon: f64) -> PrunedNmrf {
    merge(&disconnect(nmrf, epsilon))
}

/// Map bits on the reduced graph back to a feasible setting of the base NMRF.
///
/// Merged nodes copy their representative's bit. Then, in every clique with
/// several asserted nodes, only the heaviest (lowest index on ties) is kept;
/// the others must be minimal configurations.
pub fn postprocess_assignment(pruned: &PrunedNmrf, reduced_bits: &[bool]) -> Result<Vec<bool>> {
    let mut bits = pruned.twin_view().expand(reduced_bits)?;
    let base = &pruned.base;
    for c in 0..base.num_cliques() {
        let set: Vec<usize> = base.clique_range(c).filter(|&i| bits[i]).collect();
        if set.len() < 2 {
            continue;
        }
        let keep = *set
            .iter()
            .reduce(|a, b| {
                if base.nodes()[*b].weight > base.nodes()[*a].weight {
                    b
                } else {
                    a
                }
            })
            .unwrap();
        for &i in &set {
            if i == keep {
                continue;
            }
            if !pruned.minimal_flags[i] {
                return Err(Error::Invariant(format!(
                    "clique {c}: non-minimal nodes {keep} and {i} both asserted"
                )));
            }
            bits[i] = false;
        }
    }
    if let Some((u, v)) = base.graph().first_conflict(&bits) {
        return Err(Error::Infeasible(u, v));
    }
    Ok(bits)
}

/// An NMRF as handed to a solver: raw, or pruned with post-processing.
#[derive(Debug, Clone, Copy)]
pub enum NmrfInstance<'a> {
    Raw(&'a Nmrf),
    Pruned(&'a PrunedNmrf),
}

impl NmrfInstance<'_> {
    pub fn base(&self) -> &Nmrf {
        match self {
            NmrfInstance::Raw(n) => n,
            NmrfInstance::Pruned(p) => &p.base,
        }
    }

    /// Graph and weights the solver works on.
    pub fn problem(&self) -> (UndirectedGraph, Vec<f64>) {
        match self {
            NmrfInstance::Raw(n) => (n.graph().clone(), n.weights()),
            NmrfInstance::Pruned(p) => p.reduced(),
        }
    }

    /// Map solver bits to bits on the base NMRF.
    pub fn lift(&self, bits: &[bool]) -> Result<Vec<bool>> {
        match self {
            NmrfInstance::Raw(_) => Ok(bits.to_vec()),
            NmrfInstance::Pruned(p) => postprocess_assignment(p, bits),
        }
    }
}
