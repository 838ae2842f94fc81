//! Solver for hypergraphs with edges of size 2 and 3, no linearity
//! assumed. The seed case matches the linear solver; when the 2-edges form
//! a perfect matching the endgame splits on whether some 3-edge avoids
//! containing a 2-edge, and on how many such edges cross from the anchor
//! into the last two matched pairs.

use super::engine::WeightLoop;
use super::{
    engine_err, improper_edges, induced_values, split_on_stall, Flavor, SolveError,
    SolveOptions, TraceEvent,
};
use crate::derive::finalize_ordering;
use crate::hypergraph::Hypergraph;

pub(super) fn weight_covered(
    h: &Hypergraph,
    init: &[i64],
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    if crate::derive::seed_vertex(h).is_some() {
        return super::seed_loop(h, init, Flavor::R3, opts, trace);
    }
    matching_case(h, init, opts, trace, budget)
}

/// The unique 2-edge partner of every vertex in the matching case.
fn partners(h: &Hypergraph) -> Result<Vec<usize>, SolveError> {
    let mut partner = vec![usize::MAX; h.n()];
    for v in 0..h.n() {
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
        match ps.len() {
            1 => partner[v] = ps[0],
            _ => {
                return Err(SolveError::InternalCaseFailure(format!(
                    "vertex {v} has {} distinct partners in the matching case",
                    ps.len()
                )))
            }
        }
    }
    Ok(partner)
}

/// 3-edges that do not contain a matched pair.
fn pair_free_triples(h: &Hypergraph, partner: &[usize]) -> Vec<usize> {
    (0..h.m())
        .filter(|&e| {
            let edge = h.edge(e);
            edge.len() == 3 && !edge.iter().any(|&x| edge.contains(&partner[x]))
        })
        .collect()
}

fn matching_case(
    h: &Hypergraph,
    init: &[i64],
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    let partner = partners(h)?;
    let free = pair_free_triples(h, &partner);
    if free.is_empty() {
        return greedy_pair_covered(h, init, trace, budget);
    }

    // Anchor configurations: a pair-free 3-edge laid out on the last three
    // matched pairs. d2 counts pair-free edges on {middle, last}; d1 counts
    // those on {middle, partner(last)}; only d2 >= d1 layouts are usable
    // (always reachable by re-anchoring on a counted edge). Ordered by
    // descending d1 + d2; later configurations are retried when an endgame
    // cannot separate the boundary pairs, which can genuinely happen for
    // d1 = d2 = 1.
    struct Config {
        neg_sum: i64,
        rank: usize,
        pidx: usize,
        edge: usize,
        verts: [usize; 3],
        d1: usize,
        d2: usize,
    }
    let mut configs: Vec<Config> = Vec::new();
    for (rank, &ce) in free.iter().enumerate() {
        let verts = h.edge(ce);
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for (pidx, perm) in perms.iter().enumerate() {
            let (a, b, c) = (verts[perm[0]], verts[perm[1]], verts[perm[2]]);
            let d2 = free
                .iter()
                .filter(|&&e| h.edge(e).contains(&b) && h.edge(e).contains(&c))
                .count();
            let d1 = free
                .iter()
                .filter(|&&e| h.edge(e).contains(&b) && h.edge(e).contains(&partner[c]))
                .count();
            if d2 < d1 {
                continue;
            }
            configs.push(Config {
                neg_sum: -((d1 + d2) as i64),
                rank,
                pidx,
                edge: ce,
                verts: [a, b, c],
                d1,
                d2,
            });
        }
    }
    configs.sort_by_key(|c| (c.neg_sum, c.rank, c.pidx));
    if configs.is_empty() {
        return Err(SolveError::InternalCaseFailure(
            "no anchor configuration with d2 >= d1".into(),
        ));
    }

    const CONFIG_RETRIES: usize = 24;
    let mut last_err = None;
    for cfg in configs.iter().take(CONFIG_RETRIES) {
        match attempt_config(
            h, init, opts, trace, budget, &partner, &free, cfg.edge, cfg.verts, cfg.d1, cfg.d2,
        ) {
            Ok(ws) => return Ok(ws),
            Err(SolveError::InternalCaseFailure(msg)) => last_err = Some(msg),
            Err(e) => return Err(e),
        }
    }

    // Every constructive layout failed; the switching case analysis is
    // known to be incomplete for d1 = d2 = 1. Fall back to bounded exact
    // search within the weight budget.
    let iw = crate::weighting::InitialWeights::new(init.to_vec())?;
    match super::bounded_search(h, &iw, budget, 2_000_000) {
        Some((values, nodes)) => {
            trace.push(TraceEvent::FallbackSearch { nodes });
            Ok(values)
        }
        None => Err(SolveError::InternalCaseFailure(last_err.unwrap_or_else(
            || "every anchor configuration failed".into(),
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn attempt_config(
    h: &Hypergraph,
    init: &[i64],
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
    budget: i64,
    partner: &[usize],
    free: &[usize],
    ce: usize,
    [a, b, c]: [usize; 3],
    d1: usize,
    d2: usize,
) -> Result<Vec<i64>, SolveError> {
    trace.push(TraceEvent::CrossCounts { d1, d2 });

    // Edges equal to {b, partner(c), c} are set aside: the pair
    // {partner(c), c} ends up proper, which covers them.
    let dropped: Vec<usize> = {
        let mut key = vec![b, partner[c], c];
        key.sort_unstable();
        (0..h.m()).filter(|&e| h.edge(e) == key.as_slice()).collect()
    };
    let mut excluded = vec![false; h.m()];
    for &e in &dropped {
        excluded[e] = true;
    }

    let mut rev = vec![c, partner[c], b, partner[b], a, partner[a]];
    let complete = crate::derive::extend_backwards(h, &mut rev, &excluded);
    if !complete {
        rev.reverse();
        return split_on_stall(h, init, &rev, Flavor::R3, opts, trace);
    }
    rev.reverse();
    let pi = rev;
    let n = h.n();
    let (_, g_edges) = finalize_ordering(h, &pi, &excluded);
    let mut lp = WeightLoop::new(h, init, 1, vec![3; h.m()], &g_edges, &pi);

    // The fix edge: the lowest-index 2-edge on {partner(c), c}.
    let f0 = h
        .edges_at(c)
        .iter()
        .copied()
        .find(|&e| h.edge(e).len() == 2 && h.edge(e).contains(&partner[c]))
        .ok_or_else(|| SolveError::InternalCaseFailure("missing final matched pair".into()))?;

    if d1 == 0 && d2 == 1 {
        // Settle everything before the anchor's first partner, then repair
        // the three matched pairs with the anchor weight and finish with
        // the final pair's weight.
        for &v in &pi[..n - 5] {
            lp.settle_regular(v).map_err(engine_err)?;
        }
        let mut ws = lp.weights();
        let pairs = [(partner[a], a), (partner[b], b), (partner[c], c)];
        for y_anchor in 1..=budget {
            ws[ce] = y_anchor;
            let vals = induced_values(h, init, &ws);
            if pairs.iter().any(|&(p, q)| vals[p] == vals[q]) {
                continue;
            }
            for y_final in 1..=budget {
                ws[f0] = y_final;
                if improper_edges(h, &induced_values(h, init, &ws)).is_empty() {
                    trace.push(TraceEvent::AnchorWeight {
                        edge: ce,
                        weight: y_anchor,
                    });
                    trace.push(TraceEvent::PairAdjust {
                        edge: f0,
                        weight: y_final,
                    });
                    return Ok(ws);
                }
            }
            ws[f0] = lp.weight(f0);
        }
        Err(SolveError::InternalCaseFailure(
            "no anchor/final weight pair clears the endgame".into(),
        ))
    } else {
        // d1 + d2 >= 2: settle everything before the middle pair, then
        // switch crossing edges between their two admissible weights until
        // both boundary pairs are proper, finishing with the final pair.
        for &v in &pi[..n - 3] {
            lp.settle_regular(v).map_err(engine_err)?;
        }
        let crossing: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&e| {
                let edge = h.edge(e);
                edge.contains(&b) && (edge.contains(&c) || edge.contains(&partner[c]))
            })
            .collect();
        // Group by the settled third vertex; at most one switch per group
        // keeps that vertex inside its window.
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for &e in &crossing {
            let w = *h
                .edge(e)
                .iter()
                .find(|&&x| x != b && x != c && x != partner[c])
                .ok_or_else(|| {
                    SolveError::InternalCaseFailure("crossing edge without a third vertex".into())
                })?;
            match groups.iter_mut().find(|(g, _)| *g == w) {
                Some((_, list)) => list.push(e),
                None => groups.push((w, vec![e])),
            }
        }
        groups.sort_unstable_by_key(|&(w, _)| w);

        // Option lists per group: no switch, or switch exactly one edge.
        let option_counts: Vec<usize> = groups.iter().map(|(_, l)| l.len() + 1).collect();
        let mut chosen = vec![0usize; groups.len()];
        let mut tried: u64 = 0;
        const CAP: u64 = 4096;
        loop {
            tried += 1;
            if tried > CAP {
                break;
            }
            // Apply this switch combination.
            let mut applied: Vec<(usize, i64)> = Vec::new();
            let mut feasible = true;
            for (gi, &(w, ref list)) in groups.iter().enumerate() {
                if chosen[gi] == 0 {
                    continue;
                }
                let e = list[chosen[gi] - 1];
                match lp_flip_direction(&lp, w) {
                    Some(dir) => {
                        lp.apply(e, dir);
                        applied.push((e, dir));
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                let ok_pairs = lp.vertex_weight(b) != lp.vertex_weight(partner[b])
                    && lp.vertex_weight(partner[c]) != lp.vertex_weight(c);
                if ok_pairs {
                    let mut ws = lp.weights();
                    for y_final in 1..=budget {
                        ws[f0] = y_final;
                        if improper_edges(h, &induced_values(h, init, &ws)).is_empty() {
                            trace.push(TraceEvent::JointRepair { assignments: tried });
                            trace.push(TraceEvent::PairAdjust {
                                edge: f0,
                                weight: y_final,
                            });
                            return Ok(ws);
                        }
                    }
                }
            }
            for &(e, dir) in applied.iter().rev() {
                lp.apply(e, -dir);
            }
            // Next combination.
            let mut gi = 0;
            loop {
                if gi == chosen.len() {
                    tried = CAP + 1;
                    break;
                }
                chosen[gi] += 1;
                if chosen[gi] < option_counts[gi] {
                    break;
                }
                chosen[gi] = 0;
                gi += 1;
            }
            if tried > CAP {
                break;
            }
        }
        Err(SolveError::InternalCaseFailure(
            "switching endgame found no proper combination".into(),
        ))
    }
}

fn lp_flip_direction(lp: &WeightLoop, w: usize) -> Option<i64> {
    let win = lp.window(w)?;
    let val = lp.vertex_weight(w);
    if val == win.base {
        Some(2 * win.step)
    } else if val == win.base + 2 * win.step {
        Some(-2 * win.step)
    } else {
        None
    }
}

/// Every 3-edge contains a matched pair: start from all-3 and greedily fix
/// each monochromatic pair through a 3-edge meeting it in one vertex;
/// such a change toggles no other pair.
fn greedy_pair_covered(
    h: &Hypergraph,
    init: &[i64],
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    let mut ws = vec![3i64; h.m()];
    let mut adjusted = 0usize;
    let two_edges: Vec<usize> = (0..h.m()).filter(|&e| h.edge(e).len() == 2).collect();
    for &f in &two_edges {
        let vals = induced_values(h, init, &ws);
        let pair = h.edge(f);
        let (u, v) = (pair[0], pair[1]);
        if vals[u] != vals[v] {
            continue;
        }
        let fixer = (0..h.m())
            .find(|&e| {
                let edge = h.edge(e);
                edge.len() == 3 && (edge.contains(&u) ^ edge.contains(&v))
            })
            .ok_or_else(|| {
                SolveError::InternalCaseFailure(format!(
                    "no 3-edge meets pair {f} in exactly one vertex"
                ))
            })?;
        let inside = if h.edge(fixer).contains(&u) { u } else { v };
        let outside = if inside == u { v } else { u };
        let blocked = ws[fixer] + vals[outside] - vals[inside];
        let y = (1..=budget)
            .find(|&y| y != blocked)
            .expect("budget >= 2 leaves a free value");
        ws[fixer] = y;
        adjusted += 1;
    }
    trace.push(TraceEvent::GreedyContained { adjusted });
    Ok(ws)
}
