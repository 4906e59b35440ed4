use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};

use super::Permutation;

/// Undirected simple graph with strictly sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGraph {
    adj: Vec<Vec<u32>>,
}

impl SparseGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an undirected edge list. Self-loops and duplicate
    /// edges are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return invalid("vertex count exceeds u32 range");
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u},{v}) out of range for n={n}"));
            }
            if u == v {
                return invalid(format!("self-loop at {u}"));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("duplicate edge at vertex {u}"));
            }
        }
        Ok(Self { adj })
    }

    /// Builds from edges already known to be distinct and loop-free.
    pub(crate) fn from_distinct_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut adj: Vec<Vec<u32>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(u, v) in edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Graph whose vertex `perm(i)` plays the role of vertex `i` here.
    pub fn relabel(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: perm.len(),
            });
        }
        let edges: Vec<(u32, u32)> = self
            .edges()
            .map(|(u, v)| (perm.apply(u) as u32, perm.apply(v) as u32))
            .collect();
        Ok(Self::from_distinct_edges(self.n(), &edges))
    }

    /// Checks symmetry, loop-freeness and strict sorting.
    pub fn validate(&self) -> Result<()> {
        for (u, list) in self.adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("adjacency of {u} not strictly sorted"));
            }
            for &v in list {
                if v as usize == u {
                    return invalid(format!("self-loop at {u}"));
                }
                if !self.has_edge(v as usize, u) {
                    return invalid(format!("edge ({u},{v}) not symmetric"));
                }
            }
        }
        Ok(())
    }

    /// Writes the edge-list interchange format: `n <count>` then one `u v` per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n {}", self.n())?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let a = parts.next().unwrap_or_default();
            let b = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: expected two fields", lineno + 1)))?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing fields", lineno + 1)));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            if n.is_none() {
                if a != "n" {
                    return Err(Error::Parse("missing `n <count>` header".into()));
                }
                n = Some(parse(b)?);
            } else {
                edges.push((parse(a)?, parse(b)?));
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing `n <count>` header".into()))?;
        Self::from_edges(n, &edges)
    }
}
