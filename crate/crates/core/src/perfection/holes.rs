//! Exhaustive odd-hole search and the Berge test built on it.
//!
//! Chordless paths are grown depth first from each start vertex `s`, using
//! only vertices greater than `s`, so every hole is found from its minimal
//! vertex. A path `p0 .. p_last` may be extended by `v` only when `v` is
//! adjacent to `p_last` and to no other path vertex; `v` adjacent to `p0`
//! closes the cycle instead. Exhausting the search without a closure of odd
//! length >= 5 certifies that no odd hole exists.

use std::fmt;

use crate::error::Result;
use crate::limits;
use crate::perfection::graph::{complement, UndirectedGraph};

/// A chordless cycle of length at least 5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleWitness {
    pub cycle: Vec<usize>,
}

impl HoleWitness {
    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Checks distinctness, length >= 5, cyclic adjacency and absence of chords.
    pub fn is_valid_in(&self, g: &UndirectedGraph) -> bool {
        let c = &self.cycle;
        let k = c.len();
        if k < 5 || c.iter().any(|&v| v >= g.n()) {
            return false;
        }
        let mut seen = c.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return false;
        }
        for i in 0..k {
            for j in i + 1..k {
                let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                if g.has_edge(c[i], c[j]) != consecutive {
                    return false;
                }
            }
        }
        true
    }
}

/// Which graph an odd hole was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Graph,
    Complement,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Graph => f.write_str("graph"),
            Side::Complement => f.write_str("complement"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BergeVerdict {
    Berge,
    NotBerge { side: Side, hole: HoleWitness },
}

impl BergeVerdict {
    pub fn is_berge(&self) -> bool {
        matches!(self, BergeVerdict::Berge)
    }
}

impl fmt::Display for BergeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BergeVerdict::Berge => f.write_str("berge"),
            BergeVerdict::NotBerge { side, hole } => {
                write!(f, "not-berge {side}")?;
                for v in &hole.cycle {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn find_odd_hole(g: &UndirectedGraph) -> Result<Option<HoleWitness>> {
    find_odd_hole_with_limit(g, limits::HOLE_SEARCH_VERTICES)
}

pub fn find_odd_hole_with_limit(g: &UndirectedGraph, limit: usize) -> Result<Option<HoleWitness>> {
    limits::check("odd-hole search", g.n(), limit)?;
    let adj = g.masks()?;
    let n = g.n();
    let mut path = Vec::with_capacity(n);
    for s in 0..n {
        let allowed = if s + 1 >= 128 { 0 } else { !0u128 << (s + 1) } & full_mask(n);
        path.clear();
        path.push(s);
        for v in iter_bits(adj[s] & allowed) {
            path.push(v);
            if extend(&adj, allowed, &mut path, 0) {
                return Ok(Some(HoleWitness { cycle: path }));
            }
            path.pop();
        }
    }
    Ok(None)
}

/// `blocked` holds the closed neighbourhoods of the interior path vertices.
fn extend(adj: &[u128], allowed: u128, path: &mut Vec<usize>, blocked: u128) -> bool {
    let start = path[0];
    let last = *path.last().unwrap();
    let candidates = adj[last] & allowed & !blocked;
    let len = path.len();
    for v in iter_bits(candidates) {
        if adj[start] >> v & 1 == 1 {
            if len + 1 >= 5 && (len + 1) % 2 == 1 {
                path.push(v);
                return true;
            }
            continue;
        }
        let next_blocked = if len >= 2 {
            blocked | adj[last] | (1u128 << last)
        } else {
            blocked
        };
        path.push(v);
        if extend(adj, allowed, path, next_blocked) {
            return true;
        }
        path.pop();
    }
    false
}

fn full_mask(n: usize) -> u128 {
    if n >= 128 {
        !0
    } else {
        (1u128 << n) - 1
    }
}

fn iter_bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

pub fn is_berge(g: &UndirectedGraph) -> Result<BergeVerdict> {
    is_berge_with_limit(g, limits::HOLE_SEARCH_VERTICES)
}

/// Berge iff neither `g` nor its complement has an odd hole.
pub fn is_berge_with_limit(g: &UndirectedGraph, limit: usize) -> Result<BergeVerdict> {
    if let Some(hole) = find_odd_hole_with_limit(g, limit)? {
        return Ok(BergeVerdict::NotBerge {
            side: Side::Graph,
            hole,
        });
    }
    if let Some(hole) = find_odd_hole_with_limit(&complement(g), limit)? {
        return Ok(BergeVerdict::NotBerge {
            side: Side::Complement,
            hole,
        });
    }
    Ok(BergeVerdict::Berge)
}
