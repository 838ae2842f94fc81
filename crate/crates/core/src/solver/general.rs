//! General solver for hypergraphs with edges up to size r: weights start at
//! 2r-1 and move in multiples of r-1. Trailing matched pairs that end up
//! isolated in the derived graph are preprocessed so their endpoints differ
//! modulo r-1, which no later step-multiple adjustment can undo; each
//! anchor hyperedge is repaired at the end through its unique final pair.

use super::engine::WeightLoop;
use super::{
    derive_err, engine_err, improper_edges, induced_values, Flavor, SolveError, SolveOptions,
    TraceEvent,
};
use crate::derive::{finalize_ordering, solve_general_ordering, DerivedEdge};
use crate::hypergraph::Hypergraph;

pub(super) fn weight_covered(
    h: &Hypergraph,
    init: &[i64],
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    if crate::derive::seed_vertex(h).is_some() {
        // Two 2-edges share a vertex: the step-1 loop lands in {1..5}.
        return super::seed_loop(h, init, Flavor::General, opts, trace);
    }
    matching_case(h, init, trace, budget)
}

struct Component {
    last: usize,
    last_degree: usize,
}

fn derived_components(h: &Hypergraph, g_edges: &[DerivedEdge], pos: &[usize]) -> Vec<Component> {
    let n = h.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for ge in g_edges {
        let (a, b) = (
            find(&mut parent, ge.earlier),
            find(&mut parent, ge.later),
        );
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut neighbors: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    for ge in g_edges {
        neighbors[ge.earlier].insert(ge.later);
        neighbors[ge.later].insert(ge.earlier);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    groups
        .into_values()
        .map(|members| {
            let last = *members.iter().max_by_key(|&&v| pos[v]).unwrap();
            Component {
                last_degree: neighbors[last].len(),
                last,
            }
        })
        .collect()
}

fn matching_case(
    h: &Hypergraph,
    init: &[i64],
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    let r = h.max_edge_size().max(2) as i64;
    if r < 3 {
        // 2-uniform matching-case inputs are unions of isolated edges, which
        // the twin check rejects before this point.
        return Err(SolveError::InternalCaseFailure(
            "matching case reached with maximum edge size 2".into(),
        ));
    }
    let step = r - 1;
    let center = 2 * r - 1;

    let gord = solve_general_ordering(h).map_err(derive_err)?;
    let pi = &gord.pi;
    let mut pos = vec![usize::MAX; h.n()];
    for (i, &v) in pi.iter().enumerate() {
        pos[v] = i;
    }
    let (_, g_edges) = finalize_ordering(h, pi, &[]);
    let comps = derived_components(h, &g_edges, &pos);

    // A vertex settles normally when some derived edge leads to a later
    // vertex; a component's final vertex closes with the last step when it
    // has two distinct neighbors. Everything else is skipped, and each
    // derived edge arriving at a skipped vertex becomes a guard pair that
    // the preprocessing makes different modulo the step.
    let mut has_forward = vec![false; h.n()];
    for ge in &g_edges {
        has_forward[ge.earlier] = true;
    }
    let mut role_last = vec![false; h.n()];
    for comp in &comps {
        if comp.last_degree >= 2 {
            role_last[comp.last] = true;
        }
    }
    let mut guards: Vec<(usize, usize)> = Vec::new(); // (earlier, skipped later)
    for ge in &g_edges {
        let v = ge.later;
        if !has_forward[v] && !role_last[v] {
            let pair = (ge.earlier, v);
            if !guards.contains(&pair) {
                guards.push(pair);
            }
        }
    }
    guards.sort_by_key(|&(u, z)| (pos[z], pos[u]));

    // Preprocess: grow per-edge additions from {0..r-2} until each guard
    // pair differs modulo the step; re-assigning an edge's addition must
    // keep every previously handled guard pair intact.
    let mut additions = vec![0i64; h.m()];
    let mut vals = induced_values(h, init, &vec![center; h.m()]);
    let mut handled: Vec<(usize, usize)> = Vec::new();
    let mut logged: Vec<(usize, i64)> = Vec::new();
    for &(p, z) in &guards {
        let ok = |vals: &[i64], p: usize, z: usize| (vals[p] - vals[z]).rem_euclid(step) != 0;
        if ok(&vals, p, z) {
            handled.push((p, z));
            continue;
        }
        let mut chosen: Option<(usize, i64)> = None;
        'edges: for e in 0..h.m() {
            let edge = h.edge(e);
            let hits = edge.contains(&p) as usize + edge.contains(&z) as usize;
            if hits != 1 {
                continue;
            }
            for a in 0..=(r - 2) {
                let delta = a - additions[e];
                if delta == 0 {
                    continue;
                }
                let shift = |v: usize, vals: &[i64]| {
                    vals[v] + if edge.contains(&v) { delta } else { 0 }
                };
                if (shift(p, &vals) - shift(z, &vals)).rem_euclid(step) == 0 {
                    continue;
                }
                let breaks_prior = handled.iter().any(|&(p2, z2)| {
                    let touches = edge.contains(&p2) as usize + edge.contains(&z2) as usize;
                    touches == 1 && (shift(p2, &vals) - shift(z2, &vals)).rem_euclid(step) == 0
                });
                if breaks_prior {
                    continue;
                }
                chosen = Some((e, a));
                break 'edges;
            }
        }
        let Some((e, a)) = chosen else {
            return Err(SolveError::InternalCaseFailure(format!(
                "guard preprocessing failed for pair ({p}, {z})"
            )));
        };
        let delta = a - additions[e];
        additions[e] = a;
        for &v in h.edge(e) {
            vals[v] += delta;
        }
        logged.push((e, a));
        handled.push((p, z));
    }
    if !logged.is_empty() {
        trace.push(TraceEvent::GuardPreprocess { additions: logged });
    }

    let centers: Vec<i64> = additions.iter().map(|a| center + a).collect();
    let mut lp = WeightLoop::new(h, init, step, centers, &g_edges, pi);

    for &v in pi {
        if role_last[v] {
            lp.settle_last(v).map_err(engine_err)?;
        } else if has_forward[v] {
            lp.settle_regular(v).map_err(engine_err)?;
        }
        // Skipped vertices are covered by the guard preprocessing.
    }
    let mut ws = lp.weights();

    // Final pass: make every anchored segment's hyperedge proper through
    // its unique final pair, never breaking an already proper edge.
    for seg in &gord.segments {
        let Some(anchor) = &seg.anchor else { continue };
        trace.push(TraceEvent::MatchingAnchor {
            edge: anchor.edge,
            t: anchor.t,
        });
        let before = improper_edges(h, &induced_values(h, init, &ws));
        if !before.contains(&anchor.edge) {
            continue;
        }
        let saved = ws[anchor.f0_edge];
        let mut fixed = false;
        for y in 1..=budget {
            ws[anchor.f0_edge] = y;
            let after = improper_edges(h, &induced_values(h, init, &ws));
            if !after.contains(&anchor.edge) && after.iter().all(|e| before.contains(e)) {
                trace.push(TraceEvent::FinalFix {
                    edge: anchor.f0_edge,
                    weight: y,
                });
                fixed = true;
                break;
            }
        }
        if !fixed {
            ws[anchor.f0_edge] = saved;
            return Err(SolveError::InternalCaseFailure(format!(
                "no final-pair weight makes anchor edge {} proper",
                anchor.edge
            )));
        }
    }
    Ok(ws)
}
