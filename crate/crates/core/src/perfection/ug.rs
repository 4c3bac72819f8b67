//! The UG text format for (optionally weighted) undirected graphs.
//!
//! ```text
//! UG 1
//! nodes <n>
//! weights <w_1> ... <w_n>     (optional)
//! edges <m>
//! <u> <v>                     (m lines, 0 <= u < v < n)
//! ```
//!
//! Lines starting with `#` are comments.

use std::fmt::Write as _;

use crate::error::Result;
use crate::perfection::graph::UndirectedGraph;
use crate::text::{parse_error, Tokens};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub graph: UndirectedGraph,
    pub weights: Option<Vec<f64>>,
}

pub fn parse_ug(text: &str) -> Result<WeightedGraph> {
    let mut toks = Tokens::new(text);
    toks.keyword("UG")?;
    let (version, line) = toks.parse::<u32>("format version")?;
    if version != 1 {
        return Err(parse_error(
            line,
            format!("malformed header: unsupported version {version}"),
        ));
    }
    toks.keyword("nodes")?;
    let (n, _) = toks.parse::<usize>("node count")?;
    let mut weights = None;
    if toks.peek().is_some_and(|t| t.text == "weights") {
        toks.keyword("weights")?;
        let mut w = Vec::with_capacity(n);
        for _ in 0..n {
            let (x, line) = toks.parse::<f64>("weight")?;
            if !x.is_finite() {
                return Err(parse_error(line, format!("non-finite weight {x}")));
            }
            w.push(x);
        }
        weights = Some(w);
    }
    toks.keyword("edges")?;
    let (m, _) = toks.parse::<usize>("edge count")?;
    let mut graph = UndirectedGraph::empty(n);
    for _ in 0..m {
        let (u, line) = toks.parse::<usize>("edge endpoint")?;
        let (v, _) = toks.parse::<usize>("edge endpoint")?;
        if !(u < v && v < n) {
            return Err(parse_error(
                line,
                format!("edge `{u} {v}` must satisfy 0 <= u < v < {n}"),
            ));
        }
        if !graph.add_edge(u, v) {
            return Err(parse_error(line, format!("duplicate edge `{u} {v}`")));
        }
    }
    toks.expect_end()?;
    Ok(WeightedGraph { graph, weights })
}

/// Serialize; `node_comments[i]`, when given, is written as `# <comment>`
/// ahead of the header.
pub fn write_ug(graph: &UndirectedGraph, weights: Option<&[f64]>, node_comments: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(comments) = node_comments {
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
    }
    out.push_str("UG 1\n");
    let _ = writeln!(out, "nodes {}", graph.n());
    if let Some(w) = weights {
        let values: Vec<String> = w.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "weights {}", values.join(" "));
    }
    let edges = graph.edges();
    let _ = writeln!(out, "edges {}", edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
