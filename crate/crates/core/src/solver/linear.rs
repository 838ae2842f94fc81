//! Linear-hypergraph solver: seed ordering plus window loop, with the
//! matching-case anchor endgame repairing the trailing interleaved pairs.

use super::engine::WeightLoop;
use super::{
    derive_err, engine_err, improper_edges, induced_values, split_on_stall, Flavor, SolveError,
    SolveOptions, TraceEvent,
};
use crate::derive::{build_ordering, Anchor, DerivedOrdering};
use crate::hypergraph::Hypergraph;

pub(super) fn weight_covered(
    h: &Hypergraph,
    init: &[i64],
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
    budget: i64,
) -> Result<Vec<i64>, SolveError> {
    if crate::derive::seed_vertex(h).is_some() {
        return super::seed_loop(h, init, Flavor::Linear, opts, trace);
    }
    let ord = build_ordering(h).map_err(derive_err)?;
    if ord.stall.is_some() {
        return split_on_stall(h, init, &ord.pi, Flavor::Linear, opts, trace);
    }
    let anchor = ord.anchor.as_ref().ok_or_else(|| {
        SolveError::InternalCaseFailure("matching case without an anchor".into())
    })?;
    trace.push(TraceEvent::MatchingAnchor {
        edge: anchor.edge,
        t: anchor.t,
    });
    let mut lp = WeightLoop::new(h, init, 1, vec![3; h.m()], &ord.g_edges, &ord.pi);
    let boundary = anchor.boundary;
    for &v in &ord.pi[..boundary] {
        lp.settle_regular(v).map_err(engine_err)?;
    }
    lp.settle_last(ord.pi[boundary]).map_err(engine_err)?;
    let mut ws = lp.weights();
    anchor_fixup(h, init, &mut ws, &ord, anchor, budget, trace)?;
    Ok(ws)
}

/// Matching-case endgame: re-choose the anchor weight so every interleaved
/// pair is proper, then repair any leading-pair edges the shift broke by
/// tuning the trailing pairs. A bounded joint search over the same knobs
/// backs the greedy pass; anything left over is an internal failure.
fn anchor_fixup(
    h: &Hypergraph,
    init: &[i64],
    ws: &mut [i64],
    ord: &DerivedOrdering,
    anchor: &Anchor,
    budget: i64,
    trace: &mut Vec<TraceEvent>,
) -> Result<(), SolveError> {
    let t = anchor.t;
    let anchor_verts = h.edge(anchor.edge);
    let vals = induced_values(h, init, ws);

    // Values of the anchor weight that leave some interleaved pair, or (for
    // t = 3) the boundary pair of leading-component vertices, monochromatic.
    let mut blocked: Vec<i64> = Vec::new();
    for &f in &anchor.interleaved {
        let pair = h.edge(f);
        let (inside, outside) = if anchor_verts.contains(&pair[0]) {
            (pair[0], pair[1])
        } else {
            (pair[1], pair[0])
        };
        blocked.push(ws[anchor.edge] + vals[outside] - vals[inside]);
    }
    if t == 3 {
        let near = ord.pi[anchor.boundary - 2];
        let far = ord.pi[anchor.boundary - 1];
        debug_assert!(anchor_verts.contains(&near));
        blocked.push(ws[anchor.edge] + vals[far] - vals[near]);
    }
    let chosen = (1..=budget)
        .find(|y| !blocked.contains(y))
        .ok_or_else(|| {
            SolveError::InternalCaseFailure("no admissible anchor weight".into())
        })?;
    ws[anchor.edge] = chosen;
    trace.push(TraceEvent::AnchorWeight {
        edge: anchor.edge,
        weight: chosen,
    });

    if improper_edges(h, &induced_values(h, init, ws)).is_empty() {
        return Ok(());
    }

    // Knobs: the trailing interleaved pairs, then the anchor itself.
    let mut knobs: Vec<usize> = anchor.interleaved[..t - 2].to_vec();
    knobs.push(anchor.edge);

    // Greedy: any knob move that strictly shrinks the improper set.
    let mut current = improper_edges(h, &induced_values(h, init, ws)).len();
    for _ in 0..64 {
        if current == 0 {
            return Ok(());
        }
        let mut improved = false;
        'knob: for &f in &knobs {
            let saved = ws[f];
            for y in 1..=budget {
                if y == saved {
                    continue;
                }
                ws[f] = y;
                let count = improper_edges(h, &induced_values(h, init, ws)).len();
                if count < current {
                    current = count;
                    trace.push(TraceEvent::PairAdjust { edge: f, weight: y });
                    improved = true;
                    break 'knob;
                }
            }
            ws[f] = saved;
        }
        if !improved {
            break;
        }
    }
    if current == 0 {
        return Ok(());
    }

    // Bounded joint search over all knob assignments.
    let saved: Vec<i64> = knobs.iter().map(|&f| ws[f]).collect();
    let mut assignment = vec![1i64; knobs.len()];
    let mut tried: u64 = 0;
    const CAP: u64 = 200_000;
    loop {
        tried += 1;
        if tried > CAP {
            break;
        }
        for (i, &f) in knobs.iter().enumerate() {
            ws[f] = assignment[i];
        }
        if improper_edges(h, &induced_values(h, init, ws)).is_empty() {
            trace.push(TraceEvent::JointRepair { assignments: tried });
            return Ok(());
        }
        let mut i = 0;
        loop {
            if i == assignment.len() {
                tried = CAP + 1;
                break;
            }
            assignment[i] += 1;
            if assignment[i] <= budget {
                break;
            }
            assignment[i] = 1;
            i += 1;
        }
        if tried > CAP {
            break;
        }
    }
    for (i, &f) in knobs.iter().enumerate() {
        ws[f] = saved[i];
    }
    Err(SolveError::InternalCaseFailure(
        "matching-case repair exhausted its knobs".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{solve_linear, SolveOptions};
    use crate::construct::random_linear_hypergraph;
    use crate::hypergraph::Hypergraph;
    use crate::weighting::{verify, InitialWeights};

    fn h(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn matching_case_instance_is_solved() {
        // The 2-edges form a perfect matching, so the solver must lay out
        // the minimal hyperedge interleaved with its partner pairs and run
        // the anchor endgame.
        let g = h(
            8,
            &[
                &[0, 4],
                &[1, 5],
                &[2, 6],
                &[3, 7],
                &[0, 1, 2],
                &[2, 3, 5],
                &[4, 6, 7],
            ],
        );
        assert!(g.is_linear());
        assert!(!g.has_twin_edge());
        let init = InitialWeights::zero(8);
        let report = solve_linear(&g, &init, &SolveOptions::default()).unwrap();
        assert!(report.verified);
        assert!(verify(&g, &report.weights, &init).unwrap().proper);
        assert!(report
            .trace
            .iter()
            .any(|e| matches!(e, crate::solver::TraceEvent::MatchingAnchor { .. })));
    }

    #[test]
    fn anchor_instances_across_seeds() {
        // Random matchings with interleaving hyperedges; all must verify.
        for seed in 0..30 {
            let g = random_linear_hypergraph(16, 18, 4, seed).unwrap();
            let init = InitialWeights::zero(g.n());
            let report = solve_linear(&g, &init, &SolveOptions::default()).unwrap();
            assert!(report.max_weight <= report.budget, "seed {seed}");
            assert!(verify(&g, &report.weights, &init).unwrap().proper);
        }
    }

    #[test]
    fn nonzero_initial_weights_respected() {
        for seed in 0..20 {
            let g = random_linear_hypergraph(14, 12, 5, seed).unwrap();
            let vals: Vec<i64> = (0..g.n() as i64).map(|v| (v * 13) % 7).collect();
            let init = InitialWeights::new(vals).unwrap();
            let report = solve_linear(&g, &init, &SolveOptions::default()).unwrap();
            assert!(verify(&g, &report.weights, &init).unwrap().proper);
        }
    }

    #[test]
    fn anchor_edge_stays_proper_under_any_weight() {
        // Re-weighting the anchor shifts all its vertices equally, so the
        // anchor edge itself can never become monochromatic: its two
        // leading vertices got disjoint windows from the main loop.
        let g = h(
            8,
            &[
                &[0, 4],
                &[1, 5],
                &[2, 6],
                &[3, 7],
                &[0, 1, 2],
                &[2, 3, 5],
                &[4, 6, 7],
            ],
        );
        let init = InitialWeights::zero(8);
        let report = solve_linear(&g, &init, &SolveOptions::default()).unwrap();
        let anchor = 4; // the minimal hyperedge {0,1,2}
        let budget = report.budget;
        for y in 1..=budget {
            let mut ws = report.weights.values().to_vec();
            ws[anchor] = y;
            let w = crate::weighting::Weighting::new(ws).unwrap();
            let coloring = crate::weighting::induced_vertex_weights(&g, &w, &init).unwrap();
            let edge = g.edge(anchor);
            let mono = edge
                .iter()
                .all(|&v| coloring.get(v) == coloring.get(edge[0]));
            assert!(!mono, "anchor monochromatic at weight {y}");
        }
    }
}
