//! Undirected-graph toolkit: complements, line graphs, odd-hole search,
//! desk-scale Berge certification, vertex replication and seeded
//! generators.

mod generate;
mod graph;
mod holes;
mod ug;

pub use generate::{gen_family, gen_family_with_rng, random_bipartite, random_graph, Family};
pub use graph::{complement, line_graph, replicate_vertex, UndirectedGraph};
pub use holes::{
    find_odd_hole, find_odd_hole_with_limit, is_berge, is_berge_with_limit, BergeVerdict, HoleWitness, Side,
};
pub use ug::{parse_ug, write_ug, WeightedGraph};

#[cfg(test)]
pub(crate) use graph::tests::arb_graph;
