use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::limits;

/// Simple undirected graph on vertices `0..n`.
///
/// Adjacency is kept twice: a dense symmetric bit matrix for O(1) queries
/// and complements, and sorted neighbour lists for iteration.
#[derive(Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    rows: Vec<FixedBitSet>,
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl std::fmt::Debug for UndirectedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UndirectedGraph")
            .field("n", &self.n())
            .field("edges", &self.edges())
            .finish()
    }
}

impl UndirectedGraph {
    pub fn empty(n: usize) -> Self {
        UndirectedGraph {
            rows: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            neighbors: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Complete bipartite graph; left part `0..a`, right part `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Self::empty(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn row(&self, v: usize) -> &FixedBitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n() {
            for &v in &self.neighbors[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::InvalidParameter(format!(
                "edge ({u}, {v}) out of range for {n} vertices"
            )));
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
        }
        Ok(self.add_edge(u, v))
    }

    /// Returns `false` if the edge was already present. Panics on a self-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert_ne!(u, v, "self-loop");
        if self.rows[u].contains(v) {
            return false;
        }
        self.rows[u].insert(v);
        self.rows[v].insert(u);
        insert_sorted(&mut self.neighbors[u], v);
        insert_sorted(&mut self.neighbors[v], u);
        self.edge_count += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.rows[u].contains(v) {
            return false;
        }
        self.rows[u].set(v, false);
        self.rows[v].set(u, false);
        self.neighbors[u].retain(|&w| w != v);
        self.neighbors[v].retain(|&w| w != u);
        self.edge_count -= 1;
        true
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> UndirectedGraph {
        let mut g = Self::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Adjacency as `u128` masks, for the exponential kernels.
    pub(crate) fn masks(&self) -> Result<Vec<u128>> {
        limits::check_mask("vertex mask", self.n())?;
        Ok(self
            .neighbors
            .iter()
            .map(|ns| ns.iter().fold(0u128, |m, &v| m | (1u128 << v)))
            .collect())
    }

    /// `true` when no edge joins two vertices with `bits[v] == true`.
    pub fn is_stable(&self, bits: &[bool]) -> bool {
        self.first_conflict(bits).is_none()
    }

    pub fn first_conflict(&self, bits: &[bool]) -> Option<(usize, usize)> {
        (0..self.n())
            .filter(|&u| bits[u])
            .find_map(|u| self.neighbors[u].iter().find(|&&v| v > u && bits[v]).map(|&v| (u, v)))
    }
}

fn insert_sorted(list: &mut Vec<usize>, v: usize) {
    let pos = list.partition_point(|&x| x < v);
    list.insert(pos, v);
}

/// Same vertex set; `u ~ v` in the result iff `u != v` and `u !~ v` in `g`.
pub fn complement(g: &UndirectedGraph) -> UndirectedGraph {
    let n = g.n();
    let mut out = UndirectedGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                out.add_edge(u, v);
            }
        }
    }
    out
}

/// Line graph plus the map from line-graph vertex to base edge `(u, v)`.
pub fn line_graph(g: &UndirectedGraph) -> (UndirectedGraph, Vec<(usize, usize)>) {
    let edges = g.edges();
    let mut lg = UndirectedGraph::empty(edges.len());
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(i);
        incident[v].push(i);
    }
    for list in &incident {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                lg.add_edge(i, j);
            }
        }
    }
    (lg, edges)
}

/// Add a vertex `n` joined to `v` and every neighbour of `v`.
pub fn replicate_vertex(g: &UndirectedGraph, v: usize) -> Result<UndirectedGraph> {
    if v >= g.n() {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} out of range for {} vertices",
            g.n()
        )));
    }
    let n = g.n();
    let mut out = UndirectedGraph::empty(n + 1);
    for (a, b) in g.edges() {
        out.add_edge(a, b);
    }
    out.add_edge(n, v);
    for &w in g.neighbors(v) {
        out.add_edge(n, w);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn arb_graph(max_n: usize) -> impl Strategy<Value = UndirectedGraph> {
        (0..=max_n).prop_flat_map(|n| {
            let pairs = n * n.saturating_sub(1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut g = UndirectedGraph::empty(n);
                let mut it = bits.into_iter();
                for u in 0..n {
                    for v in u + 1..n {
                        if it.next().unwrap() {
                            g.add_edge(u, v);
                        }
                    }
                }
                g
            })
        })
    }

    #[test]
    fn complement_of_k4_is_empty() {
        let c = complement(&UndirectedGraph::complete(4));
        assert_eq!(c.n(), 4);
        assert_eq!(c.edge_count(), 0);
    }

    #[test]
    fn complement_of_c5_is_a_five_cycle() {
        let c = complement(&UndirectedGraph::cycle(5));
        assert_eq!(c.edge_count(), 5);
        assert!((0..5).all(|v| c.degree(v) == 2));
        // 0-2-4-1-3-0 is the complementary cycle
        let order = [0, 2, 4, 1, 3];
        for i in 0..5 {
            assert!(c.has_edge(order[i], order[(i + 1) % 5]));
            assert!(!c.has_edge(order[i], order[(i + 2) % 5]));
        }
    }

    #[test]
    fn line_graph_examples() {
        let (lg, map) = line_graph(&UndirectedGraph::path(3));
        assert_eq!((lg.n(), lg.edge_count()), (2, 1));
        assert_eq!(map, vec![(0, 1), (1, 2)]);

        let (lg, _) = line_graph(&UndirectedGraph::complete(3));
        assert_eq!(lg, UndirectedGraph::complete(3));

        let k23 = UndirectedGraph::complete_bipartite(2, 3);
        let (lg, map) = line_graph(&k23);
        // brute-force count of edge pairs sharing an endpoint
        let mut shared = 0;
        for i in 0..map.len() {
            for j in i + 1..map.len() {
                let (a, b) = map[i];
                let (c, d) = map[j];
                if a == c || a == d || b == c || b == d {
                    shared += 1;
                }
            }
        }
        assert_eq!(shared, 9);
        assert_eq!((lg.n(), lg.edge_count()), (6, 9));
    }

    #[test]
    fn replicate_examples() {
        let k2 = replicate_vertex(&UndirectedGraph::empty(1), 0).unwrap();
        assert_eq!(k2, UndirectedGraph::complete(2));
        for v in 0..3 {
            assert_eq!(
                replicate_vertex(&UndirectedGraph::complete(3), v).unwrap(),
                UndirectedGraph::complete(4)
            );
        }
        assert!(replicate_vertex(&UndirectedGraph::complete(3), 3).is_err());
    }

    #[test]
    fn edge_validation() {
        let mut g = UndirectedGraph::empty(3);
        assert!(g.try_add_edge(0, 0).is_err());
        assert!(g.try_add_edge(0, 3).is_err());
        assert!(g.try_add_edge(0, 1).unwrap());
        assert!(!g.try_add_edge(1, 0).unwrap());
        assert_eq!(g.neighbors(1), &[0]);
        assert!(g.remove_edge(1, 0));
        assert_eq!(g.edge_count(), 0);
    }

    proptest! {
        #[test]
        fn complement_is_an_involution(g in arb_graph(9)) {
            let c = complement(&g);
            prop_assert_eq!(c.edge_count() + g.edge_count(), g.n() * g.n().saturating_sub(1) / 2);
            prop_assert_eq!(complement(&c), g);
        }

        #[test]
        fn adjacency_views_agree(g in arb_graph(9)) {
            for u in 0..g.n() {
                prop_assert!(!g.has_edge(u, u));
                let from_row: Vec<usize> = g.row(u).ones().collect();
                prop_assert_eq!(&from_row, &g.neighbors(u).to_vec());
                for v in 0..g.n() {
                    prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
                }
            }
        }
    }
}
