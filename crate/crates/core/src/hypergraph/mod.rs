//! Hypergraphs on vertex set `0..n` with sparse edge lists.

mod generate;
mod io;

pub use generate::{generate_h1, generate_h2, generate_h2_even, resample_first_column};
pub use io::{from_json, from_text, load, save, to_json, to_text};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a hypergraph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    H1,
    H2,
    H2Even,
    File,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::H1 => "h1",
            ModelTag::H2 => "h2",
            ModelTag::H2Even => "h2-even",
            ModelTag::File => "file",
        }
    }

    pub fn parse(s: &str) -> Option<ModelTag> {
        match s {
            "h1" => Some(ModelTag::H1),
            "h2" => Some(ModelTag::H2),
            "h2-even" => Some(ModelTag::H2Even),
            "file" => Some(ModelTag::File),
            _ => None,
        }
    }
}

/// A hypergraph with `n` vertices and an ordered list of edges.
///
/// Each edge is a strictly increasing list of vertex ids below `n`; empty
/// edges are allowed.  Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<u32>>,
    model_tag: Option<ModelTag>,
}

impl Hypergraph {
    /// Builds a hypergraph, checking that every edge is strictly increasing
    /// and in range.
    pub fn new(n: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::param(format!("vertex count {n} exceeds u32 range")));
        }
        for (i, e) in edges.iter().enumerate() {
            validate_edge(n, e).map_err(|msg| Error::param(format!("edge {i}: {msg}")))?;
        }
        Ok(Hypergraph {
            n,
            edges,
            model_tag: None,
        })
    }

    /// Sorts and deduplicates each edge before validating.
    pub fn from_unsorted(n: usize, mut edges: Vec<Vec<u32>>) -> Result<Self> {
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        Self::new(n, edges)
    }

    pub(crate) fn from_parts_unchecked(n: usize, edges: Vec<Vec<u32>>, tag: ModelTag) -> Self {
        debug_assert!(edges.iter().all(|e| validate_edge(n, e).is_ok()));
        Hypergraph {
            n,
            edges,
            model_tag: Some(tag),
        }
    }

    pub fn with_tag(mut self, tag: Option<ModelTag>) -> Self {
        self.model_tag = tag;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i]
    }

    pub fn model_tag(&self) -> Option<ModelTag> {
        self.model_tag
    }

    /// Σ_e |e|.
    pub fn incidence_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// For each vertex, the ids of the edges containing it (ascending).
    pub fn vertex_edges(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                adj[v as usize].push(i as u32);
            }
        }
        adj
    }

    /// Same hypergraph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::param("permutation length differs from n"));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v as usize]).collect())
            .collect();
        Ok(Self::from_unsorted(self.n, edges)?.with_tag(self.model_tag))
    }
}

fn validate_edge(n: usize, e: &[u32]) -> std::result::Result<(), String> {
    for w in e.windows(2) {
        if w[0] >= w[1] {
            return Err(format!("ids not strictly increasing ({} then {})", w[0], w[1]));
        }
    }
    if let Some(&last) = e.last() {
        if last as usize >= n {
            return Err(format!("vertex id {last} out of range for n = {n}"));
        }
    }
    Ok(())
}

/// Outcome of the edge-size regularity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSizeCheck {
    pub ok: bool,
    pub violating: Vec<usize>,
}

/// Checks that every edge size lies in `[t/2, 3t/2]`.
pub fn check_edge_sizes(h: &Hypergraph, t: usize) -> Result<EdgeSizeCheck> {
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    let violating: Vec<usize> = h
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| 2 * e.len() < t || 2 * e.len() > 3 * t)
        .map(|(i, _)| i)
        .collect();
    Ok(EdgeSizeCheck {
        ok: violating.is_empty(),
        violating,
    })
}
