use crate::error::Result;
use crate::limits;
use crate::perfection::UndirectedGraph;

pub fn maximal_cliques(g: &UndirectedGraph) -> Result<Vec<Vec<usize>>> {
    maximal_cliques_with_limit(g, limits::CLIQUE_VERTICES)
}

/// All inclusion-maximal cliques (Bron–Kerbosch with pivoting), each sorted,
/// the list sorted lexicographically. Isolated vertices are singletons.
pub fn maximal_cliques_with_limit(g: &UndirectedGraph, limit: usize) -> Result<Vec<Vec<usize>>> {
    limits::check("maximal clique enumeration", g.n(), limit)?;
    let adj = g.masks()?;
    let n = g.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let all = u128::MAX >> (128 - n);
    expand(&adj, 0, all, 0, &mut out);
    let mut cliques: Vec<Vec<usize>> = out.into_iter().map(bits_of).collect();
    cliques.sort();
    Ok(cliques)
}

fn expand(adj: &[u128], r: u128, p: u128, x: u128, out: &mut Vec<u128>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    // pivot maximizing |P ∩ N(u)|, lowest index on ties
    let mut pivot = usize::MAX;
    let mut best = -1i64;
    let mut px = p | x;
    while px != 0 {
        let u = px.trailing_zeros() as usize;
        px &= px - 1;
        let c = (p & adj[u]).count_ones() as i64;
        if c > best {
            best = c;
            pivot = u;
        }
    }
    let mut p = p;
    let mut x = x;
    let mut todo = p & !adj[pivot];
    while todo != 0 {
        let v = todo.trailing_zeros() as usize;
        todo &= todo - 1;
        let bit = 1u128 << v;
        expand(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

fn bits_of(mut mask: u128) -> Vec<usize> {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        v.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perfection::arb_graph;
    use proptest::prelude::*;

    /// Every vertex subset that is a clique and cannot be extended.
    fn brute_cliques(g: &UndirectedGraph) -> Vec<Vec<usize>> {
        let n = g.n();
        let is_clique =
            |m: u32| (0..n).all(|a| (0..n).all(|b| a == b || m >> a & 1 == 0 || m >> b & 1 == 0 || g.has_edge(a, b)));
        let mut out = Vec::new();
        for m in 1u32..(1 << n) {
            if is_clique(m) && (0..n).all(|v| m >> v & 1 == 1 || !is_clique(m | 1 << v)) {
                out.push((0..n).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn examples() {
        assert_eq!(
            maximal_cliques(&UndirectedGraph::complete(3)).unwrap(),
            vec![vec![0, 1, 2]]
        );
        assert_eq!(
            maximal_cliques(&UndirectedGraph::path(3)).unwrap(),
            vec![vec![0, 1], vec![1, 2]]
        );
        let c5 = UndirectedGraph::cycle(5);
        let cl = maximal_cliques(&c5).unwrap();
        assert_eq!(cl, vec![vec![0, 1], vec![0, 4], vec![1, 2], vec![2, 3], vec![3, 4]]);
        assert_eq!(cl, brute_cliques(&c5));
        assert_eq!(
            maximal_cliques(&UndirectedGraph::empty(2)).unwrap(),
            vec![vec![0], vec![1]]
        );
        assert!(maximal_cliques(&UndirectedGraph::empty(0)).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn matches_subset_enumeration(g in arb_graph(9)) {
            prop_assert_eq!(maximal_cliques(&g).unwrap(), brute_cliques(&g));
        }
    }
}
