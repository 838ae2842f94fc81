//! Vertex orderings for the constructive solvers: the reduction that puts
//! every vertex into a 2-edge, the backward ordering extension, and the
//! derived graph built from 2-edges and the leading pair of every larger
//! edge.

use crate::hypergraph::{Hypergraph, HypergraphError, VertexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeriveError {
    #[error("vertex {0} lies in no 2-edge; run the reduction first")]
    VertexNotIn2Edge(usize),
    #[error("hypergraph has a twin edge")]
    TwinEdge,
    #[error("no usable anchor hyperedge: {0}")]
    NoAnchor(String),
    #[error("reduction stuck: every candidate deletion creates a twin edge")]
    StripStuck,
    #[error("internal derive invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Record of the strip reduction: deleted vertices in order (original ids)
/// and the composed original-to-reduced vertex relabeling. Edge indices are
/// stable across the reduction, so weightings lift back unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripTrace {
    pub deleted: Vec<usize>,
    pub vertex_map: Vec<Option<usize>>,
}

/// Repeatedly deletes a vertex lying in no 2-edge; when a deletion would
/// create a twin edge, a different no-2-edge vertex is chosen instead
/// (ascending id, first deletion that stays twin-free).
pub fn strip_non_2edge_vertices(
    h: &Hypergraph,
) -> Result<(Hypergraph, StripTrace), DeriveError> {
    if h.has_twin_edge() {
        return Err(DeriveError::TwinEdge);
    }
    let mut cur = h.clone();
    let mut cur_to_orig: Vec<usize> = (0..h.n()).collect();
    let mut deleted = Vec::new();
    loop {
        let candidates: Vec<usize> = (0..cur.n())
            .filter(|&v| !cur.edges_at(v).iter().any(|&e| cur.edge(e).len() == 2))
            .collect();
        if candidates.is_empty() {
            break;
        }
        let mut committed = false;
        for &x in &candidates {
            let (next, map) = cur.delete_vertex(x)?;
            if next.has_twin_edge() {
                continue;
            }
            if map.edge_map.iter().enumerate().any(|(i, m)| *m != Some(i)) {
                return Err(DeriveError::Internal(
                    "strip deletion dropped an edge".into(),
                ));
            }
            deleted.push(cur_to_orig[x]);
            cur_to_orig = (0..cur.n())
                .filter(|&u| u != x)
                .map(|u| cur_to_orig[u])
                .collect();
            cur = next;
            committed = true;
            break;
        }
        if !committed {
            return Err(DeriveError::StripStuck);
        }
    }
    let mut vertex_map = vec![None; h.n()];
    for (new_id, &orig) in cur_to_orig.iter().enumerate() {
        vertex_map[orig] = Some(new_id);
    }
    Ok((cur, StripTrace { deleted, vertex_map }))
}

/// Lowest vertex with at least two distinct 2-edge partners, if any.
/// Such a vertex can end the ordering with derived degree >= 2.
pub fn seed_vertex(h: &Hypergraph) -> Option<usize> {
    (0..h.n()).find(|&v| distinct_partners(h, v).len() >= 2)
}

fn distinct_partners(h: &Hypergraph, v: usize) -> Vec<usize> {
    let mut ps: Vec<usize> = h
        .edges_at(v)
        .iter()
        .filter(|&&e| h.edge(e).len() == 2)
        .map(|&e| {
            let edge = h.edge(e);
            if edge[0] == v {
                edge[1]
            } else {
                edge[0]
            }
        })
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Extends `rev` (vertices listed from the final position backwards) with
/// vertices having an edge whose remaining vertices all lie in the ordered
/// part. Ties break to the lowest vertex id. Edges flagged in `excluded`
/// never enable an extension. Returns true when every vertex got ordered.
pub fn extend_backwards(h: &Hypergraph, rev: &mut Vec<usize>, excluded: &[bool]) -> bool {
    let n = h.n();
    let mut in_order = vec![false; n];
    for &v in rev.iter() {
        in_order[v] = true;
    }
    let skip = |e: usize| excluded.get(e).copied().unwrap_or(false);
    let mut remaining: Vec<usize> = h
        .edges()
        .iter()
        .map(|e| e.iter().filter(|&&v| !in_order[v]).count())
        .collect();
    let mut candidates = std::collections::BTreeSet::new();
    for (e, edge) in h.edges().iter().enumerate() {
        if !skip(e) && remaining[e] == 1 {
            let free = edge.iter().find(|&&v| !in_order[v]).unwrap();
            candidates.insert(*free);
        }
    }
    while let Some(&u) = candidates.iter().next() {
        candidates.remove(&u);
        if in_order[u] {
            continue;
        }
        in_order[u] = true;
        rev.push(u);
        for &e in h.edges_at(u) {
            remaining[e] -= 1;
            if !skip(e) && remaining[e] == 1 {
                if let Some(&free) = h.edge(e).iter().find(|&&v| !in_order[v]) {
                    candidates.insert(free);
                }
            }
        }
    }
    rev.len() == n
}

/// The leading pair of an edge: its two earliest vertices under `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadPair {
    pub edge: usize,
    /// (earlier vertex, later vertex) by position.
    pub pair: (usize, usize),
}

/// One edge of the derived graph, tagged with its source hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedEdge {
    pub earlier: usize,
    pub later: usize,
    pub edge: usize,
}

/// The anchor of the matching case: the minimal hyperedge interleaved with
/// 2-edges at the end of the ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    /// Index of the anchor hyperedge.
    pub edge: usize,
    /// Its size (the number of interleaved 2-edges).
    pub t: usize,
    /// 2-edge indices by trailing offset: entry `i` pairs the anchor vertex
    /// at position `n-1-2i` (0-based) with its partner right before it.
    pub interleaved: Vec<usize>,
    /// 0-based position of the last vertex of the leading component
    /// (`n - 2t + 3`); later positions hold the trailing interleaved pairs.
    pub boundary: usize,
}

/// Ordering data for the constructive weighting pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedOrdering {
    /// Vertices by position, earliest first. When `stall` is set, only the
    /// ordered suffix is listed (its first entry is the earliest ordered
    /// position).
    pub pi: Vec<usize>,
    /// Indices of the 2-edges.
    pub e2: Vec<usize>,
    /// Leading pairs of all edges of size >= 3 (complete orderings only).
    pub epi: Vec<LeadPair>,
    /// The derived graph: 2-edges plus leading pairs, with back-pointers.
    pub g_edges: Vec<DerivedEdge>,
    /// Number of ordered suffix vertices when the extension stalled.
    pub stall: Option<usize>,
    pub anchor: Option<Anchor>,
}

fn two_edge_indices(h: &Hypergraph) -> Vec<usize> {
    (0..h.m()).filter(|&e| h.edge(e).len() == 2).collect()
}

fn positions(h: &Hypergraph, pi: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; h.n()];
    for (i, &v) in pi.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Computes leading pairs and the derived graph for a complete ordering.
pub fn finalize_ordering(
    h: &Hypergraph,
    pi: &[usize],
    excluded: &[bool],
) -> (Vec<LeadPair>, Vec<DerivedEdge>) {
    let pos = positions(h, pi);
    let mut epi = Vec::new();
    let mut g = Vec::new();
    for (e, edge) in h.edges().iter().enumerate() {
        if excluded.get(e).copied().unwrap_or(false) {
            continue;
        }
        match edge.len() {
            0 | 1 => {}
            2 => {
                let (a, b) = if pos[edge[0]] < pos[edge[1]] {
                    (edge[0], edge[1])
                } else {
                    (edge[1], edge[0])
                };
                g.push(DerivedEdge {
                    earlier: a,
                    later: b,
                    edge: e,
                });
            }
            _ => {
                let mut vs: Vec<usize> = edge.clone();
                vs.sort_by_key(|&v| pos[v]);
                epi.push(LeadPair {
                    edge: e,
                    pair: (vs[0], vs[1]),
                });
                g.push(DerivedEdge {
                    earlier: vs[0],
                    later: vs[1],
                    edge: e,
                });
            }
        }
    }
    (epi, g)
}

/// Builds the ordering for the linear solver: seed a vertex in two distinct
/// 2-edges when one exists, otherwise lay out a minimal hyperedge
/// interleaved with its matching partners, then extend backwards.
pub fn build_ordering(h: &Hypergraph) -> Result<DerivedOrdering, DeriveError> {
    if h.has_twin_edge() {
        return Err(DeriveError::TwinEdge);
    }
    for v in 0..h.n() {
        if !h.edges_at(v).iter().any(|&e| h.edge(e).len() == 2) {
            return Err(DeriveError::VertexNotIn2Edge(v));
        }
    }
    let e2 = two_edge_indices(h);
    let n = h.n();

    let (mut rev, anchor_proto) = match seed_vertex(h) {
        Some(s) => (vec![s], None),
        None => {
            // Every vertex has exactly one distinct partner: the 2-edges
            // form a perfect matching on the vertex set.
            let anchor_edge = (0..h.m())
                .filter(|&e| h.edge(e).len() >= 3)
                .min_by_key(|&e| (h.edge(e).len(), e))
                .ok_or_else(|| {
                    DeriveError::NoAnchor("matching case but no edge of size >= 3".into())
                })?;
            let hv: Vec<usize> = h.edge(anchor_edge).to_vec();
            let t = hv.len();
            let mut rev = Vec::with_capacity(2 * t);
            let mut interleaved = Vec::with_capacity(t);
            // Ascending anchor vertex id maps to ascending position, so the
            // reverse layout walks the anchor from its largest id down.
            for &x in hv.iter().rev() {
                let pair_edge = h
                    .edges_at(x)
                    .iter()
                    .copied()
                    .find(|&e| h.edge(e).len() == 2)
                    .ok_or_else(|| DeriveError::Internal("anchor vertex lost its 2-edge".into()))?;
                let edge = h.edge(pair_edge);
                let partner = if edge[0] == x { edge[1] } else { edge[0] };
                if hv.contains(&partner) {
                    return Err(DeriveError::NoAnchor(
                        "anchor edge contains a full 2-edge; input is not linear".into(),
                    ));
                }
                rev.push(x);
                rev.push(partner);
                interleaved.push(pair_edge);
            }
            (rev, Some((anchor_edge, t, interleaved)))
        }
    };

    let complete = extend_backwards(h, &mut rev, &[]);
    if !complete {
        let stall = rev.len();
        rev.reverse();
        return Ok(DerivedOrdering {
            pi: rev,
            e2,
            epi: Vec::new(),
            g_edges: Vec::new(),
            stall: Some(stall),
            anchor: None,
        });
    }
    rev.reverse();
    let pi = rev;
    let (epi, g_edges) = finalize_ordering(h, &pi, &[]);
    let anchor = anchor_proto.map(|(edge, t, interleaved)| Anchor {
        edge,
        t,
        interleaved,
        boundary: n - 2 * t + 3,
    });
    Ok(DerivedOrdering {
        pi,
        e2,
        epi,
        g_edges,
        stall: None,
        anchor,
    })
}

/// Anchor data for one segment of the general (non-linear) ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentAnchor {
    /// Original edge whose vertices anchor the segment.
    pub edge: usize,
    /// Number of distinct matched pairs the anchor intersects.
    pub t: usize,
    /// Original edge adjusted by the final properness fix; it meets the
    /// anchor in exactly one vertex.
    pub f0_edge: usize,
}

/// One maximal backward-extension segment of the general ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// 0-based position of the segment's first vertex in the full ordering.
    pub start: usize,
    pub len: usize,
    /// Set when the segment was rooted at an anchor hyperedge rather than
    /// a seed vertex.
    pub anchor: Option<SegmentAnchor>,
}

/// Complete multi-segment ordering for the general solver. Stalls never
/// recurse here: the remaining hypergraph is re-rooted and ordered until
/// all vertices are placed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralOrdering {
    pub pi: Vec<usize>,
    pub segments: Vec<Segment>,
}

/// Builds the multi-segment ordering of the general solver: seed segments
/// where two 2-edges meet, anchor segments where the 2-edges form a
/// matching (the anchor meets some matched pair in exactly one vertex and
/// as few pairs as possible), continuing on the remainder after each stall.
pub fn solve_general_ordering(h: &Hypergraph) -> Result<GeneralOrdering, DeriveError> {
    if h.has_twin_edge() {
        return Err(DeriveError::TwinEdge);
    }
    for v in 0..h.n() {
        if !h.edges_at(v).iter().any(|&e| h.edge(e).len() == 2) {
            return Err(DeriveError::VertexNotIn2Edge(v));
        }
    }
    let mut cur = h.clone();
    let mut cur_to_orig: Vec<usize> = (0..h.n()).collect();
    let mut cur_edge_to_orig: Vec<usize> = (0..h.m()).collect();
    let mut rev_segments: Vec<(Vec<usize>, Option<SegmentAnchor>)> = Vec::new();

    while cur.n() > 0 {
        let (mut rev, anchor) = match seed_vertex(&cur) {
            Some(s) => (vec![s], None),
            None => {
                let (rev, anchor) = general_anchor_layout(&cur)?;
                let mapped = SegmentAnchor {
                    edge: cur_edge_to_orig[anchor.edge],
                    t: anchor.t,
                    f0_edge: cur_edge_to_orig[anchor.f0_edge],
                };
                (rev, Some(mapped))
            }
        };
        extend_backwards(&cur, &mut rev, &[]);
        let rev_orig: Vec<usize> = rev.iter().map(|&v| cur_to_orig[v]).collect();
        let done = rev.len() == cur.n();
        rev_segments.push((rev_orig, anchor));
        if done {
            break;
        }
        let vs = VertexSet::new(rev.clone()).map_err(DeriveError::Hypergraph)?;
        let (next, map) = cur.delete_vertices(&vs)?;
        cur_to_orig = (0..cur.n())
            .filter_map(|u| map.vertex_map[u].map(|_| cur_to_orig[u]))
            .collect();
        cur_edge_to_orig = (0..cur.m())
            .filter_map(|e| map.edge_map[e].map(|_| cur_edge_to_orig[e]))
            .collect();
        cur = next;
    }

    let mut pi = Vec::with_capacity(h.n());
    let mut segments = Vec::with_capacity(rev_segments.len());
    for (rev, anchor) in rev_segments.iter().rev() {
        let start = pi.len();
        pi.extend(rev.iter().rev().copied());
        segments.push(Segment {
            start,
            len: rev.len(),
            anchor: anchor.clone(),
        });
    }
    // Earliest segment first in `segments`, matching position order.
    Ok(GeneralOrdering { pi, segments })
}

struct RawAnchor {
    edge: usize,
    t: usize,
    f0_edge: usize,
}

/// Matching-case anchor for the general solver, on the current (possibly
/// reduced) hypergraph: pick the hyperedge meeting some matched pair in
/// exactly one vertex and as few pairs as possible, then lay the met pairs
/// out at the end of the ordering with anchor vertices on even offsets.
fn general_anchor_layout(cur: &Hypergraph) -> Result<(Vec<usize>, RawAnchor), DeriveError> {
    // Every vertex has exactly one distinct partner here.
    let n = cur.n();
    let mut partner = vec![usize::MAX; n];
    let mut pair_edge = vec![usize::MAX; n];
    for v in 0..n {
        let ps = distinct_partners(cur, v);
        match ps.len() {
            1 => {
                partner[v] = ps[0];
                pair_edge[v] = cur
                    .edges_at(v)
                    .iter()
                    .copied()
                    .find(|&e| cur.edge(e).len() == 2)
                    .unwrap();
            }
            0 => return Err(DeriveError::VertexNotIn2Edge(v)),
            _ => {
                return Err(DeriveError::Internal(
                    "seed vertex present in matching case".into(),
                ))
            }
        }
    }
    let mut best: Option<(usize, usize, usize)> = None; // (t, edge, f0 vertex)
    for e in 0..cur.m() {
        let edge = cur.edge(e);
        if edge.len() < 3 {
            continue;
        }
        let lone = edge.iter().copied().find(|&x| !edge.contains(&partner[x]));
        let Some(lone_vertex) = lone else { continue };
        let mut mates: Vec<usize> = edge.iter().map(|&x| x.min(partner[x])).collect();
        mates.sort_unstable();
        mates.dedup();
        let t = mates.len();
        if best.is_none_or(|(bt, be, _)| (t, e) < (bt, be)) {
            best = Some((t, e, lone_vertex));
        }
    }
    let Some((t, anchor_edge, f0_vertex)) = best else {
        return Err(DeriveError::NoAnchor(
            "no hyperedge meets a matched pair in exactly one vertex".into(),
        ));
    };

    let edge = cur.edge(anchor_edge);
    // Distinct matched pairs met by the anchor, keyed by their lower vertex.
    let mut pair_keys: Vec<usize> = edge.iter().map(|&x| x.min(partner[x])).collect();
    pair_keys.sort_unstable();
    pair_keys.dedup();
    let f0_key = f0_vertex.min(partner[f0_vertex]);

    let mut rev = Vec::with_capacity(2 * t);
    let mut push_pair = |key: usize| {
        let (a, b) = (key, partner[key]);
        // Anchor vertex on the even (later) offset; when both endpoints are
        // in the anchor, the higher id takes the even slot.
        let (even, odd) = if edge.contains(&a) && edge.contains(&b) {
            (a.max(b), a.min(b))
        } else if edge.contains(&a) {
            (a, b)
        } else {
            (b, a)
        };
        rev.push(even);
        rev.push(odd);
    };
    push_pair(f0_key);
    for &k in pair_keys.iter().filter(|&&k| k != f0_key) {
        push_pair(k);
    }
    Ok((
        rev,
        RawAnchor {
            edge: anchor_edge,
            t,
            f0_edge: pair_edge[f0_vertex],
        },
    ))
}
