//! Seeded graph generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; the stream
//! is consumed as one Bernoulli draw per candidate vertex pair in
//! lexicographic `(u, v)` order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perfection::graph::{complement, line_graph, UndirectedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bipartite,
    ComplementBipartite,
    LineOfBipartite,
    ComplementLineOfBipartite,
    Random,
}

impl Family {
    pub const BERGE: [Family; 4] = [
        Family::Bipartite,
        Family::ComplementBipartite,
        Family::LineOfBipartite,
        Family::ComplementLineOfBipartite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bipartite => "bipartite",
            Family::ComplementBipartite => "complement_bipartite",
            Family::LineOfBipartite => "line_of_bipartite",
            Family::ComplementLineOfBipartite => "complement_line_of_bipartite",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Family::Bipartite,
            Family::ComplementBipartite,
            Family::LineOfBipartite,
            Family::ComplementLineOfBipartite,
            Family::Random,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

/// Bipartite graph with parts `0..a` and `a..a+b`, each cross pair kept
/// with probability `p`.
pub fn random_bipartite<R: Rng>(a: usize, b: usize, p: f64, rng: &mut R) -> UndirectedGraph {
    let mut g = UndirectedGraph::empty(a + b);
    for u in 0..a {
        for v in a..a + b {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Erdős–Rényi `G(n, p)`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> UndirectedGraph {
    let mut g = UndirectedGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Generate a member of `family`.
///
/// For the bipartite-based families `n` is the vertex count of the base
/// bipartite graph, split into parts of `ceil(n/2)` and `floor(n/2)`; the
/// line-graph families therefore have as many vertices as the base graph
/// has edges. For `random`, `n` is the vertex count.
pub fn gen_family_with_rng<R: Rng>(family: Family, n: usize, p: f64, rng: &mut R) -> Result<UndirectedGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("graph size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
    }
    let (a, b) = (n.div_ceil(2), n / 2);
    Ok(match family {
        Family::Random => random_graph(n, p, rng),
        Family::Bipartite => random_bipartite(a, b, p, rng),
        Family::ComplementBipartite => complement(&random_bipartite(a, b, p, rng)),
        Family::LineOfBipartite => line_graph(&random_bipartite(a, b, p, rng)).0,
        Family::ComplementLineOfBipartite => complement(&line_graph(&random_bipartite(a, b, p, rng)).0),
    })
}

pub fn gen_family(family: Family, n: usize, p: f64, seed: u64) -> Result<UndirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_family_with_rng(family, n, p, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perfection::holes::is_berge;

    #[test]
    fn full_bipartite_is_c4() {
        for seed in 0..5 {
            let g = gen_family(Family::Bipartite, 4, 1.0, seed).unwrap();
            assert_eq!(g, UndirectedGraph::complete_bipartite(2, 2));
            assert_eq!(g.edges(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        for family in Family::BERGE.into_iter().chain([Family::Random]) {
            let a = gen_family(family, 8, 0.5, 42).unwrap();
            let b = gen_family(family, 8, 0.5, 42).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_family(Family::Random, 0, 0.5, 1).is_err());
        assert!(gen_family(Family::Random, 4, 1.5, 1).is_err());
        assert!(gen_family(Family::Random, 4, f64::NAN, 1).is_err());
        assert!("nope".parse::<Family>().is_err());
        assert_eq!("line_of_bipartite".parse::<Family>().unwrap(), Family::LineOfBipartite);
    }

    #[test]
    fn berge_families_pass_berge_test() {
        for family in Family::BERGE {
            let n = match family {
                Family::Bipartite | Family::ComplementBipartite => 16,
                _ => 8,
            };
            for seed in 0..50 {
                let g = gen_family(family, n, 0.5, seed).unwrap();
                assert!(g.n() <= 16);
                assert!(is_berge(&g).unwrap().is_berge(), "{family} seed {seed}");
            }
        }
    }

    #[test]
    fn dense_random_graphs_are_often_not_berge() {
        let failures = (0..100)
            .filter(|&seed| {
                !is_berge(&gen_family(Family::Random, 10, 0.5, seed).unwrap())
                    .unwrap()
                    .is_berge()
            })
            .count();
        assert!(failures >= 1);
    }
}
