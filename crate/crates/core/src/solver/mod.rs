//! Constructive weighting solvers, one per weight budget, each returning
//! a verified weighting.
//!
//! All three share the same skeleton: split into connected components,
//! solve tiny components by bounded exact search, reduce until every vertex
//! lies in a 2-edge, order the vertices backwards, run the incremental
//! window loop over the derived graph, and repair the matching-case
//! endgame. A stalled ordering splits the instance and recurses, passing
//! cross-edge weights down as initial vertex weights.

mod engine;
mod general;
mod linear;
mod r3;

pub use engine::{EngineError, ParityWindow, WeightLoop};

use crate::derive::DeriveError;
use crate::hypergraph::{Hypergraph, VertexSet};
use crate::oracle::{self, SearchLimits};
use crate::weighting::{verify, InitialWeights, Weighting, WeightingError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("an edge consisting of twins admits no vertex-coloring weighting")]
    NotColorable,
    #[error("internal case failure: {0}")]
    InternalCaseFailure(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Weighting(#[from] WeightingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Linear,
    R3,
    General,
    Auto,
}

impl std::str::FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(SolveMode::Linear),
            "r3" => Ok(SolveMode::R3),
            "general" => Ok(SolveMode::General),
            "auto" => Ok(SolveMode::Auto),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// On an internal case failure, try bounded exact search on the
    /// affected component within the weight budget before giving up.
    pub fallback_search: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flavor {
    Linear,
    R3,
    General,
}

impl Flavor {
    fn budget(self, max_edge_size: usize) -> i64 {
        let r = max_edge_size.max(2) as i64;
        match self {
            Flavor::Linear => 5.max(r + 1),
            Flavor::R3 => 5,
            Flavor::General => 5 * r - 5,
        }
    }

    fn mode(self) -> SolveMode {
        match self {
            Flavor::Linear => SolveMode::Linear,
            Flavor::R3 => SolveMode::R3,
            Flavor::General => SolveMode::General,
        }
    }
}

/// One replayable step of a solve run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Components { count: usize },
    BaseCase { vertices: usize, edges: usize },
    Strip { vertices: Vec<usize> },
    SeedOrder { seed: usize },
    MatchingAnchor { edge: usize, t: usize },
    RecursionSplit { suffix: usize, rest: usize },
    GreedyContained { adjusted: usize },
    CrossCounts { d1: usize, d2: usize },
    AnchorWeight { edge: usize, weight: i64 },
    PairAdjust { edge: usize, weight: i64 },
    GuardPreprocess { additions: Vec<(usize, i64)> },
    FinalFix { edge: usize, weight: i64 },
    JointRepair { assignments: u64 },
    FallbackSearch { nodes: u64 },
}

/// A verified weighting together with the budget it satisfies and the case
/// trace of the run. `verified` is true on every returned report; failures
/// surface as errors instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub budget: i64,
    pub max_weight: i64,
    pub verified: bool,
    pub weights: Weighting,
    pub trace: Vec<TraceEvent>,
}

pub fn solve_linear(
    h: &Hypergraph,
    init: &InitialWeights,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    solve(h, init, SolveMode::Linear, opts)
}

pub fn solve_r3(
    h: &Hypergraph,
    init: &InitialWeights,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    solve(h, init, SolveMode::R3, opts)
}

pub fn solve_general(
    h: &Hypergraph,
    init: &InitialWeights,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    solve(h, init, SolveMode::General, opts)
}

/// Entry point: checks the obstruction, picks the flavor (`Auto` takes the
/// tightest applicable budget), solves, and re-verifies the result.
pub fn solve(
    h: &Hypergraph,
    init: &InitialWeights,
    mode: SolveMode,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if init.values().len() != h.n() {
        return Err(SolveError::Weighting(WeightingError::LengthMismatch {
            expected: h.n(),
            got: init.values().len(),
        }));
    }
    if h.has_twin_edge() {
        return Err(SolveError::NotColorable);
    }
    let r = h.max_edge_size().max(2);
    let flavor = match mode {
        SolveMode::Linear => {
            if !h.is_linear() {
                return Err(SolveError::Unsupported(
                    "linear mode requires a linear hypergraph".into(),
                ));
            }
            Flavor::Linear
        }
        SolveMode::R3 => {
            if r > 3 {
                return Err(SolveError::Unsupported(
                    "r3 mode requires all edges of size at most 3".into(),
                ));
            }
            Flavor::R3
        }
        SolveMode::General => Flavor::General,
        SolveMode::Auto => {
            if h.is_linear() {
                Flavor::Linear
            } else if r <= 3 {
                Flavor::R3
            } else {
                Flavor::General
            }
        }
    };
    let budget = flavor.budget(h.max_edge_size());
    let mut trace = Vec::new();
    let values = solve_rec(h, init.values(), flavor, opts, &mut trace)?;
    let weights = Weighting::new(values)?;
    let report = verify(h, &weights, init)?;
    if !report.proper {
        return Err(SolveError::InternalCaseFailure(format!(
            "post-verification found monochromatic edges {:?}",
            report.monochromatic
        )));
    }
    let max_weight = if weights.is_empty() {
        0
    } else {
        weights.max_weight()?
    };
    if max_weight > budget {
        return Err(SolveError::InternalCaseFailure(format!(
            "weight {max_weight} exceeds budget {budget}"
        )));
    }
    Ok(SolveReport {
        mode: flavor.mode(),
        budget,
        max_weight,
        verified: true,
        weights,
        trace,
    })
}

pub(crate) fn solve_rec(
    h: &Hypergraph,
    init: &[i64],
    flavor: Flavor,
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
) -> Result<Vec<i64>, SolveError> {
    if h.m() == 0 {
        return Ok(Vec::new());
    }
    if h.has_twin_edge() {
        return Err(SolveError::InternalCaseFailure(
            "twin edge appeared during recursion".into(),
        ));
    }
    let comps = h.components();
    if comps.len() > 1 {
        trace.push(TraceEvent::Components { count: comps.len() });
        let mut out = vec![0i64; h.m()];
        for comp in &comps {
            let (sub, map) = h
                .induced(comp)
                .map_err(|e| SolveError::InternalCaseFailure(e.to_string()))?;
            if sub.m() == 0 {
                continue;
            }
            let sub_init: Vec<i64> = comp.ids().iter().map(|&v| init[v]).collect();
            let sub_ws = solve_rec(&sub, &sub_init, flavor, opts, trace)?;
            for (e, mapped) in map.edge_map.iter().enumerate() {
                if let Some(i) = mapped {
                    out[e] = sub_ws[*i];
                }
            }
        }
        return Ok(out);
    }

    solve_connected(h, init, flavor, opts, trace)
}

fn solve_connected(
    h: &Hypergraph,
    init: &[i64],
    flavor: Flavor,
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
) -> Result<Vec<i64>, SolveError> {
    let budget = flavor.budget(h.max_edge_size());

    if h.n() <= 6 && h.m() <= 10 {
        trace.push(TraceEvent::BaseCase {
            vertices: h.n(),
            edges: h.m(),
        });
        return base_case(h, init, budget);
    }

    let uncovered = (0..h.n()).any(|v| !h.edges_at(v).iter().any(|&e| h.edge(e).len() == 2));
    if uncovered {
        let (reduced, strip) = crate::derive::strip_non_2edge_vertices(h).map_err(derive_err)?;
        trace.push(TraceEvent::Strip {
            vertices: strip.deleted.clone(),
        });
        let mut sub_init = vec![0i64; reduced.n()];
        for (orig, mapped) in strip.vertex_map.iter().enumerate() {
            if let Some(v) = mapped {
                sub_init[*v] = init[orig];
            }
        }
        // Edge indices are stable across the reduction, so the weighting
        // lifts back verbatim.
        return solve_rec(&reduced, &sub_init, flavor, opts, trace);
    }

    let result = match flavor {
        Flavor::Linear => linear::weight_covered(h, init, opts, trace, budget),
        Flavor::R3 => r3::weight_covered(h, init, opts, trace, budget),
        Flavor::General => general::weight_covered(h, init, opts, trace, budget),
    };
    let values = match result {
        Ok(values) => values,
        Err(SolveError::InternalCaseFailure(reason)) if opts.fallback_search => {
            let iw = InitialWeights::new(init.to_vec())?;
            match bounded_search(h, &iw, budget, 5_000_000) {
                Some((values, nodes)) => {
                    trace.push(TraceEvent::FallbackSearch { nodes });
                    values
                }
                None => return Err(SolveError::InternalCaseFailure(reason)),
            }
        }
        Err(e) => return Err(e),
    };
    check_component(h, init, &values, budget)?;
    Ok(values)
}

fn base_case(h: &Hypergraph, init: &[i64], budget: i64) -> Result<Vec<i64>, SolveError> {
    let iw = InitialWeights::new(init.to_vec())?;
    bounded_search(h, &iw, budget, 2_000_000)
        .map(|(values, _)| values)
        .ok_or_else(|| {
            SolveError::InternalCaseFailure(format!(
                "base case found no weighting within budget {budget}: edges {:?}, init {:?}",
                h.edges(),
                init
            ))
        })
}

/// Exact search in ascending cap order. Refuting a small cap is cheap, and
/// tiny twin-free instances are feasible with very small weights, so this
/// terminates far faster than one search at the full budget (where wide
/// branching makes dead all-small prefixes exponentially costlier).
pub(crate) fn bounded_search(
    h: &Hypergraph,
    init: &InitialWeights,
    budget: i64,
    max_nodes: u64,
) -> Option<(Vec<i64>, u64)> {
    let lim = SearchLimits::nodes(max_nodes);
    match oracle::min_max_weight(h, budget, init, lim, 1) {
        Ok(result) => match result.outcome {
            oracle::OracleOutcome::KMin { witness, .. } => {
                Some((witness.values().to_vec(), result.nodes))
            }
            _ => None,
        },
        Err(_) => None,
    }
}

/// Seed-case weighting shared by all flavors: order backwards from a
/// vertex in two distinct 2-edges, then run the step-1 loop over the whole
/// component, closing at the seed. Stalls split and recurse.
pub(crate) fn seed_loop(
    h: &Hypergraph,
    init: &[i64],
    flavor: Flavor,
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
) -> Result<Vec<i64>, SolveError> {
    let ord = crate::derive::build_ordering(h).map_err(derive_err)?;
    if ord.stall.is_some() {
        return split_on_stall(h, init, &ord.pi, flavor, opts, trace);
    }
    debug_assert!(ord.anchor.is_none());
    trace.push(TraceEvent::SeedOrder {
        seed: *ord.pi.last().unwrap(),
    });
    let n = h.n();
    let mut lp = WeightLoop::new(h, init, 1, vec![3; h.m()], &ord.g_edges, &ord.pi);
    for &v in &ord.pi[..n - 1] {
        lp.settle_regular(v).map_err(engine_err)?;
    }
    lp.settle_last(ord.pi[n - 1]).map_err(engine_err)?;
    Ok(lp.weights())
}

/// Stall handling shared by all flavors: weight the rest of the hypergraph
/// first, add the weights of edges crossing into the ordered suffix to the
/// suffix's initial vertex weights, then weight the suffix.
pub(crate) fn split_on_stall(
    h: &Hypergraph,
    init: &[i64],
    suffix: &[usize],
    flavor: Flavor,
    opts: &SolveOptions,
    trace: &mut Vec<TraceEvent>,
) -> Result<Vec<i64>, SolveError> {
    trace.push(TraceEvent::RecursionSplit {
        suffix: suffix.len(),
        rest: h.n() - suffix.len(),
    });
    let set = VertexSet::new(suffix.to_vec())
        .map_err(|e| SolveError::InternalCaseFailure(e.to_string()))?;
    let (rest, rest_map) = h
        .delete_vertices(&set)
        .map_err(|e| SolveError::InternalCaseFailure(e.to_string()))?;
    if rest.edges().iter().any(|e| e.len() < 2) {
        return Err(SolveError::InternalCaseFailure(
            "stall split left a short edge outside the suffix".into(),
        ));
    }
    let rest_init: Vec<i64> = (0..h.n())
        .filter(|&v| rest_map.vertex_map[v].is_some())
        .map(|v| init[v])
        .collect();
    let rest_ws = solve_rec(&rest, &rest_init, flavor, opts, trace)?;

    let (suffix_h, suffix_map) = h
        .induced(&set)
        .map_err(|e| SolveError::InternalCaseFailure(e.to_string()))?;
    let mut suffix_init: Vec<i64> = set.ids().iter().map(|&v| init[v]).collect();
    for (e, edge) in h.edges().iter().enumerate() {
        if let Some(i) = rest_map.edge_map[e] {
            // Edge survives on the rest side; add its weight to the initial
            // weight of each suffix vertex it contains.
            let w = rest_ws[i];
            for &v in edge {
                if let Some(sv) = suffix_map.vertex_map[v] {
                    suffix_init[sv] += w;
                }
            }
        }
    }
    let suffix_ws = solve_rec(&suffix_h, &suffix_init, flavor, opts, trace)?;

    let mut out = vec![0i64; h.m()];
    for e in 0..h.m() {
        if let Some(i) = rest_map.edge_map[e] {
            out[e] = rest_ws[i];
        } else if let Some(i) = suffix_map.edge_map[e] {
            out[e] = suffix_ws[i];
        } else {
            return Err(SolveError::InternalCaseFailure(format!(
                "edge {e} lost by the stall split"
            )));
        }
    }
    Ok(out)
}

pub(crate) fn check_component(
    h: &Hypergraph,
    init: &[i64],
    values: &[i64],
    budget: i64,
) -> Result<(), SolveError> {
    if let Some(&w) = values.iter().find(|&&w| w < 1 || w > budget) {
        return Err(SolveError::InternalCaseFailure(format!(
            "weight {w} outside 1..={budget}"
        )));
    }
    let weights = Weighting::new(values.to_vec())?;
    let iw = InitialWeights::new(init.to_vec())?;
    let report = verify(h, &weights, &iw)?;
    if !report.proper {
        return Err(SolveError::InternalCaseFailure(format!(
            "component verification failed on edges {:?}",
            report.monochromatic
        )));
    }
    Ok(())
}

pub(crate) fn derive_err(e: DeriveError) -> SolveError {
    SolveError::InternalCaseFailure(e.to_string())
}

pub(crate) fn engine_err(e: EngineError) -> SolveError {
    SolveError::InternalCaseFailure(e.to_string())
}

/// Induced vertex weights for raw vectors; solver-internal fast path.
pub(crate) fn induced_values(h: &Hypergraph, init: &[i64], ws: &[i64]) -> Vec<i64> {
    let mut vals = init.to_vec();
    for (e, edge) in h.edges().iter().enumerate() {
        for &v in edge {
            vals[v] += ws[e];
        }
    }
    vals
}

pub(crate) fn improper_edges(h: &Hypergraph, vals: &[i64]) -> Vec<usize> {
    h.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| crate::weighting::edge_monochromatic(e, vals))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{fano_plane, incidence_hypergraph, random_linear_hypergraph};

    fn h(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    fn zero(n: usize) -> InitialWeights {
        InitialWeights::zero(n)
    }

    #[test]
    fn isolated_edge_not_colorable() {
        let g = h(2, &[&[0, 1]]);
        assert!(matches!(
            solve_linear(&g, &zero(2), &SolveOptions::default()),
            Err(SolveError::NotColorable)
        ));
    }

    #[test]
    fn fano_incidence_within_budget_five() {
        let (g, _) = incidence_hypergraph(&fano_plane()).unwrap();
        let report = solve_linear(&g, &zero(g.n()), &SolveOptions::default()).unwrap();
        assert!(report.verified);
        assert!(report.max_weight <= 5);
        assert_eq!(report.budget, 5);
    }

    #[test]
    fn graphs_stay_within_five() {
        for seed in 0..50 {
            let g = random_linear_hypergraph(12, 14, 2, seed).unwrap();
            let report = solve_linear(&g, &zero(g.n()), &SolveOptions::default()).unwrap();
            assert!(report.max_weight <= 5, "seed {seed}");
        }
    }

    #[test]
    fn auto_picks_tightest_mode() {
        let lin = random_linear_hypergraph(10, 8, 3, 3).unwrap();
        let r = solve(&lin, &zero(10), SolveMode::Auto, &SolveOptions::default()).unwrap();
        assert_eq!(r.mode, SolveMode::Linear);

        let tri = h(4, &[&[0, 1, 2], &[1, 2, 3], &[0, 1], &[2, 3], &[0, 3], &[1, 3]]);
        assert!(!tri.is_linear());
        let r = solve(&tri, &zero(4), SolveMode::Auto, &SolveOptions::default()).unwrap();
        assert_eq!(r.mode, SolveMode::R3);
    }

    #[test]
    fn nonlinear_rejected_by_linear_mode() {
        let g = h(4, &[&[0, 1, 2], &[1, 2, 3], &[0, 3]]);
        assert!(matches!(
            solve_linear(&g, &zero(4), &SolveOptions::default()),
            Err(SolveError::Unsupported(_))
        ));
    }

    #[test]
    fn trace_is_serializable() {
        let g = h(6, &[&[0, 3], &[1, 4], &[2, 5], &[0, 1, 2], &[3, 4], &[4, 5]]);
        let report = solve_linear(&g, &zero(6), &SolveOptions::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"mode\""));
    }

    #[test]
    fn edgeless_input_solves_vacuously() {
        let g = h(4, &[]);
        let report = solve_linear(&g, &zero(4), &SolveOptions::default()).unwrap();
        assert!(report.verified);
        assert_eq!(report.max_weight, 0);
        assert!(report.weights.is_empty());
    }

    #[test]
    fn isolated_vertices_beside_edges_are_fine() {
        let g = h(6, &[&[0, 1], &[1, 2]]);
        let report = solve_linear(&g, &zero(6), &SolveOptions::default()).unwrap();
        assert!(report.verified);
    }

    #[test]
    fn identical_inputs_give_identical_reports() {
        for seed in [3u64, 17, 99] {
            let g = crate::construct::random_hypergraph(14, 16, 4, seed).unwrap();
            let a = solve(&g, &zero(g.n()), SolveMode::Auto, &SolveOptions::default()).unwrap();
            let b = solve(&g, &zero(g.n()), SolveMode::Auto, &SolveOptions::default()).unwrap();
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.max_weight, b.max_weight);
        }
    }
}
