//! Instance generators: the incidence construction used for lower bounds,
//! complete graphs, the Fano plane, and seeded random corpora.

use crate::hypergraph::{Hypergraph, HypergraphError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("vertex {0} has degree {1} < 2; the incidence construction requires min degree 2")]
    DegreeTooLow(usize, usize),
    #[error("edge {0} has size {1} < 2")]
    EdgeTooSmall(usize, usize),
    #[error("complete graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("sampling failed after {0} restarts; parameters are likely infeasible")]
    SamplingFailed(usize),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// SplitMix64, the 64-bit mixing generator from Steele, Lea and Flood's
/// "Fast splittable pseudorandom number generators". The exact sequence is
/// part of the generator contract so corpora reproduce across
/// implementations: the state advances by 0x9E3779B97F4A7C15 per draw and
/// each output is the mixed pre-advance state. Bounded draws use plain
/// remainder: `next_u64() % bound`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..bound` via remainder (documented contract).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }
}

/// The pair (source vertex, source edge index) naming one incidence of the
/// source hypergraph; labels biject with the vertices of the constructed
/// hypergraph in lexicographic (vertex, edge) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceLabel {
    pub vertex: usize,
    pub edge: usize,
}

/// Builds the incidence hypergraph of `f`: one vertex per incidence pair,
/// one edge per source vertex (its incidence bundle, size = degree) followed
/// by one edge per source edge (size = edge size).
///
/// Requires min degree >= 2 and min edge size >= 2 so no size-1 edges arise.
pub fn incidence_hypergraph(
    f: &Hypergraph,
) -> Result<(Hypergraph, Vec<IncidenceLabel>), ConstructError> {
    for v in 0..f.n() {
        let d = f.edges_at(v).len();
        if d < 2 {
            return Err(ConstructError::DegreeTooLow(v, d));
        }
    }
    for (i, e) in f.edges().iter().enumerate() {
        if e.len() < 2 {
            return Err(ConstructError::EdgeTooSmall(i, e.len()));
        }
    }

    let mut labels = Vec::new();
    let mut id_of = std::collections::HashMap::new();
    for v in 0..f.n() {
        for &e in f.edges_at(v) {
            id_of.insert((v, e), labels.len());
            labels.push(IncidenceLabel { vertex: v, edge: e });
        }
    }

    let mut edges = Vec::new();
    // Per-vertex bundles.
    for v in 0..f.n() {
        edges.push(f.edges_at(v).iter().map(|&e| id_of[&(v, e)]).collect());
    }
    // Per-edge bundles.
    for (e, verts) in f.edges().iter().enumerate() {
        edges.push(verts.iter().map(|&v| id_of[&(v, e)]).collect());
    }

    let h = Hypergraph::new(labels.len(), edges)?;
    Ok((h, labels))
}

/// Complete graph on `q >= 2` vertices as a 2-uniform hypergraph.
pub fn complete_graph(q: usize) -> Result<Hypergraph, ConstructError> {
    if q < 2 {
        return Err(ConstructError::TooFewVertices(q));
    }
    let mut edges = Vec::with_capacity(q * (q - 1) / 2);
    for i in 0..q {
        for j in (i + 1)..q {
            edges.push(vec![i, j]);
        }
    }
    Ok(Hypergraph::new(q, edges)?)
}

/// The Fano plane: 7 points, 7 lines of size 3, 3-regular and linear.
pub fn fano_plane() -> Hypergraph {
    let lines = vec![
        vec![0, 1, 2],
        vec![0, 3, 4],
        vec![0, 5, 6],
        vec![1, 3, 5],
        vec![1, 4, 6],
        vec![2, 3, 6],
        vec![2, 4, 5],
    ];
    Hypergraph::new(7, lines).expect("fano plane is valid")
}

/// Cycle graph on `n >= 3` vertices.
pub fn cycle_graph(n: usize) -> Result<Hypergraph, ConstructError> {
    if n < 3 {
        return Err(ConstructError::TooFewVertices(n));
    }
    let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Ok(Hypergraph::new(n, edges)?)
}

const MAX_RESTARTS: usize = 64;
const MAX_EDGE_TRIES: usize = 2000;

fn sample_edge(rng: &mut SplitMix64, n: usize, r: usize) -> Vec<usize> {
    let max_size = r.min(n);
    let size = 2 + rng.below((max_size - 1) as u64) as usize;
    let mut e: Vec<usize> = Vec::with_capacity(size);
    while e.len() < size {
        let v = rng.below(n as u64) as usize;
        if !e.contains(&v) {
            e.push(v);
        }
    }
    e.sort_unstable();
    e
}

fn shares_two(a: &[usize], b: &[usize]) -> bool {
    let mut common = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                if common >= 2 {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

fn random_instance(
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
    linear: bool,
) -> Result<Hypergraph, ConstructError> {
    assert!(n >= 2 && r >= 2, "need n >= 2 and r >= 2");
    let mut rng = SplitMix64::new(seed);
    for _restart in 0..MAX_RESTARTS {
        let mut edges: Vec<Vec<usize>> = Vec::with_capacity(m);
        let mut ok = true;
        'edges: for _ in 0..m {
            for _ in 0..MAX_EDGE_TRIES {
                let e = sample_edge(&mut rng, n, r);
                if linear && edges.iter().any(|prev| shares_two(prev, &e)) {
                    continue;
                }
                edges.push(e);
                continue 'edges;
            }
            ok = false;
            break;
        }
        if !ok {
            continue;
        }
        let h = Hypergraph::new(n, edges)?;
        if !h.has_twin_edge() {
            return Ok(h);
        }
    }
    Err(ConstructError::SamplingFailed(MAX_RESTARTS))
}

/// Seeded random linear hypergraph: `m` edges with sizes in `[2, r]`,
/// pairwise sharing at most one vertex, twin-edge-free. Rejection sampling
/// from [`SplitMix64`]; identical parameters reproduce identical instances.
pub fn random_linear_hypergraph(
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
) -> Result<Hypergraph, ConstructError> {
    random_instance(n, m, r, seed, true)
}

/// Seeded random hypergraph with sizes in `[2, r]`; duplicates and
/// non-linear intersections allowed, twin edges rejected.
pub fn random_hypergraph(
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
) -> Result<Hypergraph, ConstructError> {
    random_instance(n, m, r, seed, false)
}
