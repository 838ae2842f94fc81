//! Immutable hypergraph data model: structural predicates and reduction
//! operators (vertex deletion, induced subhypergraphs, twin detection).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("vertex id {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("edge {0} contains a repeated vertex")]
    RepeatedVertex(usize),
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A sorted set of distinct vertex ids, a subset of some host hypergraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Builds a vertex set from arbitrary ids; sorts and rejects duplicates.
    pub fn new(mut ids: Vec<usize>) -> Result<Self, HypergraphError> {
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(HypergraphError::InvalidVertexSet(
                "duplicate vertex id".into(),
            ));
        }
        Ok(VertexSet(ids))
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

/// Maps vertex and edge indices of a hypergraph onto a reduced hypergraph.
///
/// `vertex_map[v]` is the new id of old vertex `v` (`None` if deleted);
/// `edge_map[e]` is the new index of old edge `e` (`None` if dropped).
/// Relabeling is order-preserving: surviving ids keep their relative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    pub vertex_map: Vec<Option<usize>>,
    pub edge_map: Vec<Option<usize>>,
}

/// A hypergraph on vertices `0..n` with an ordered list of edges.
///
/// Each edge is a strictly increasing sequence of distinct vertex ids.
/// Duplicate edges are permitted as distinct list entries; edge identity
/// is the list index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting each edge and validating ids.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let mut sorted = edges;
        for (i, e) in sorted.iter_mut().enumerate() {
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex(i));
            }
            if let Some(&v) = e.last() {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange(v, n));
                }
            }
        }
        let incidence = build_incidence(n, &sorted);
        Ok(Hypergraph {
            n,
            edges: sorted,
            incidence,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    /// Indices of the edges containing `v`, in increasing order.
    pub fn edges_at(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Number of edge list entries containing `v`; duplicates count once per copy.
    pub fn degree(&self, v: usize) -> Result<usize, HypergraphError> {
        if v >= self.n {
            return Err(HypergraphError::VertexOutOfRange(v, self.n));
        }
        Ok(self.incidence[v].len())
    }

    /// Maximum edge size, 0 for an edgeless hypergraph.
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff every pair of distinct edge entries shares at most one vertex.
    /// Duplicate edges of size >= 2 make the hypergraph non-linear.
    pub fn is_linear(&self) -> bool {
        // Pairs sharing >= 2 vertices are found via co-occurrence of vertex pairs.
        use std::collections::HashSet;
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for e in &self.edges {
            for i in 0..e.len() {
                for j in (i + 1)..e.len() {
                    if !seen.insert((e[i], e[j])) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// Partitions the vertices into twin classes: `u` and `v` share a class
    /// iff they lie in exactly the same edge list entries (index-sensitive,
    /// so each copy of a duplicate edge counts separately).
    pub fn twin_classes(&self) -> Vec<Vec<usize>> {
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            groups.entry(&self.incidence[v]).or_default().push(v);
        }
        let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
        classes.sort_by_key(|c| c[0]);
        classes
    }

    /// True iff some edge consists entirely of twins, or has size <= 1.
    /// Such an edge is monochromatic under every weighting.
    pub fn has_twin_edge(&self) -> bool {
        self.edges.iter().any(|e| self.is_twin_edge(e))
    }

    fn is_twin_edge(&self, e: &[usize]) -> bool {
        if e.len() <= 1 {
            return true;
        }
        let first = &self.incidence[e[0]];
        e[1..].iter().all(|&v| self.incidence[v] == *first)
    }

    /// Deletes `v` from every edge, keeping nonempty results.
    pub fn delete_vertex(&self, v: usize) -> Result<(Hypergraph, ReductionMap), HypergraphError> {
        if v >= self.n {
            return Err(HypergraphError::VertexOutOfRange(v, self.n));
        }
        let mut vertex_map = vec![None; self.n];
        let mut next = 0usize;
        for u in 0..self.n {
            if u != v {
                vertex_map[u] = Some(next);
                next += 1;
            }
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let reduced: Vec<usize> = e
                .iter()
                .filter(|&&u| u != v)
                .map(|&u| vertex_map[u].unwrap())
                .collect();
            if !reduced.is_empty() {
                edge_map[i] = Some(edges.len());
                edges.push(reduced);
            }
        }
        let h = Hypergraph::new(self.n - 1, edges)?;
        Ok((h, ReductionMap { vertex_map, edge_map }))
    }

    /// Deletes every vertex in `vs`, composing the per-vertex deletions.
    pub fn delete_vertices(
        &self,
        vs: &VertexSet,
    ) -> Result<(Hypergraph, ReductionMap), HypergraphError> {
        let mut vertex_map = vec![None; self.n];
        let mut next = 0usize;
        for u in 0..self.n {
            if !vs.contains(u) {
                vertex_map[u] = Some(next);
                next += 1;
            }
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let reduced: Vec<usize> = e
                .iter()
                .filter_map(|&u| vertex_map[u])
                .collect();
            if !reduced.is_empty() {
                edge_map[i] = Some(edges.len());
                edges.push(reduced);
            }
        }
        let h = Hypergraph::new(next, edges)?;
        Ok((h, ReductionMap { vertex_map, edge_map }))
    }

    /// Induced subhypergraph on `x`: keeps exactly the edges contained in `x`,
    /// relabeled onto `0..x.len()` preserving id order.
    pub fn induced(&self, x: &VertexSet) -> Result<(Hypergraph, ReductionMap), HypergraphError> {
        if let Some(&v) = x.ids().last() {
            if v >= self.n {
                return Err(HypergraphError::VertexOutOfRange(v, self.n));
            }
        }
        let mut vertex_map = vec![None; self.n];
        for (rank, &v) in x.ids().iter().enumerate() {
            vertex_map[v] = Some(rank);
        }
        let mut edge_map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.iter().all(|&u| vertex_map[u].is_some()) {
                edge_map[i] = Some(edges.len());
                edges.push(e.iter().map(|&u| vertex_map[u].unwrap()).collect());
            }
        }
        let h = Hypergraph::new(x.len(), edges)?;
        Ok((h, ReductionMap { vertex_map, edge_map }))
    }

    /// Connected components under shared-edge reachability; isolated
    /// vertices form singleton components. Sorted by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for e in &self.edges {
            for w in e.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v);
        }
        groups
            .into_values()
            .map(VertexSet)
            .collect()
    }

    /// Parses the text interchange format: the first non-comment line is
    /// `n m`, followed by `m` edge lines of space-separated vertex ids.
    /// Lines starting with `#` are comments. Counts are capped at 10^6
    /// each, the scale the interchange format is meant for.
    pub fn parse(text: &str) -> Result<Hypergraph, HypergraphError> {
        const MAX_COUNT: usize = 1_000_000;
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| HypergraphError::Parse("missing header line".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| HypergraphError::Parse("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| HypergraphError::Parse("bad edge count".into()))?;
        if n > MAX_COUNT || m > MAX_COUNT {
            return Err(HypergraphError::Parse(format!(
                "counts {n} x {m} exceed the format limit of {MAX_COUNT}"
            )));
        }
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| HypergraphError::Parse("fewer edge lines than header".into()))?;
            let edge: Result<Vec<usize>, _> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| HypergraphError::Parse(format!("bad vertex id '{t}'")))
                })
                .collect();
            edges.push(edge?);
        }
        Hypergraph::new(n, edges)
    }
}

fn build_incidence(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        for &v in e {
            inc[v].push(i);
        }
    }
    inc
}

impl fmt::Display for Hypergraph {
    /// Writes the text interchange format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.edges.len())?;
        for e in &self.edges {
            let ids: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", ids.join(" "))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Hypergraph {
    type Err = HypergraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Hypergraph::parse(s)
    }
}
