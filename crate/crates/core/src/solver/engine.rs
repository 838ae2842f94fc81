//! Incremental weighting loop over the derived graph.
//!
//! Every edge starts at a provisional center weight and is adjusted at most
//! twice: by one step when its earlier endpoint is settled (only the first
//! forward edge of that vertex), and by two steps when its later endpoint
//! is settled. Each settled vertex receives a two-value window
//! `{base, base + 2*step}` its induced weight stays inside; adjacent
//! settled vertices get disjoint windows, which keeps every settled derived
//! edge properly colored under all later adjustments.

use crate::derive::DerivedEdge;
use crate::hypergraph::Hypergraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("vertex {0} has no forward derived edge")]
    NoForwardEdge(usize),
    #[error("no open value for vertex {0}")]
    NoOpenValue(usize),
    #[error("final vertex {0} has derived degree {1} < 2")]
    DegreeTooLow(usize, usize),
    #[error("window invariant violated at vertex {0}")]
    WindowViolated(usize),
}

/// The two admissible induced weights of a settled vertex:
/// `{base, base + 2*step}`. In scaled units (offsets of `base` from the
/// vertex's residue class, divided by `step`) the base is 0 or 1 mod 4, so
/// distinct bases in the same residue class give disjoint windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityWindow {
    pub base: i64,
    pub step: i64,
}

impl ParityWindow {
    pub fn contains(&self, value: i64) -> bool {
        value == self.base || value == self.base + 2 * self.step
    }
}

pub struct WeightLoop<'a> {
    h: &'a Hypergraph,
    step: i64,
    centers: Vec<i64>,
    delta: Vec<i64>,
    vertex_weight: Vec<i64>,
    window: Vec<Option<i64>>,
    settled: Vec<bool>,
    pos: Vec<usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl<'a> WeightLoop<'a> {
    /// `centers[e]` is the provisional weight of edge `e` (plus any
    /// preprocessing addition); `g_edges` is the derived graph; `pi` lists
    /// vertices by position.
    pub fn new(
        h: &'a Hypergraph,
        init: &[i64],
        step: i64,
        centers: Vec<i64>,
        g_edges: &[DerivedEdge],
        pi: &[usize],
    ) -> Self {
        assert!(step >= 1);
        assert_eq!(centers.len(), h.m());
        let mut vertex_weight = init.to_vec();
        for (e, edge) in h.edges().iter().enumerate() {
            for &v in edge {
                vertex_weight[v] += centers[e];
            }
        }
        let mut pos = vec![usize::MAX; h.n()];
        for (i, &v) in pi.iter().enumerate() {
            pos[v] = i;
        }
        let mut adjacency = vec![Vec::new(); h.n()];
        for ge in g_edges {
            adjacency[ge.earlier].push((ge.later, ge.edge));
            adjacency[ge.later].push((ge.earlier, ge.edge));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        WeightLoop {
            h,
            step,
            centers,
            delta: vec![0; h.m()],
            vertex_weight,
            window: vec![None; h.n()],
            settled: vec![false; h.n()],
            pos,
            adjacency,
        }
    }

    pub fn weight(&self, e: usize) -> i64 {
        self.centers[e] + self.delta[e]
    }

    pub fn vertex_weight(&self, v: usize) -> i64 {
        self.vertex_weight[v]
    }

    pub fn window(&self, v: usize) -> Option<ParityWindow> {
        self.window[v].map(|base| ParityWindow {
            base,
            step: self.step,
        })
    }

    pub fn is_settled(&self, v: usize) -> bool {
        self.settled[v]
    }

    /// Adds `d` to edge `e`, updating every incident vertex weight.
    pub fn apply(&mut self, e: usize, d: i64) {
        if d == 0 {
            return;
        }
        self.delta[e] += d;
        for &v in self.h.edge(e) {
            self.vertex_weight[v] += d;
        }
    }

    pub fn weights(&self) -> Vec<i64> {
        (0..self.h.m()).map(|e| self.weight(e)).collect()
    }

    /// Flip direction of the derived edges anchored at settled vertex `u`:
    /// +2*step when u sits on its window base, -2*step when on base+2*step.
    fn flip_direction(&self, u: usize) -> Result<i64, EngineError> {
        let base = self.window[u].ok_or(EngineError::WindowViolated(u))?;
        let w = self.vertex_weight[u];
        if w == base {
            Ok(2 * self.step)
        } else if w == base + 2 * self.step {
            Ok(-2 * self.step)
        } else {
            Err(EngineError::WindowViolated(u))
        }
    }

    /// Backward derived edges of `v` grouped by settled, windowed neighbor:
    /// (neighbor, flip direction, edge carrying the flip).
    fn backward_groups(&self, v: usize) -> Result<Vec<(usize, i64, usize)>, EngineError> {
        let mut groups: Vec<(usize, i64, usize)> = Vec::new();
        for &(u, e) in &self.adjacency[v] {
            if self.pos[u] < self.pos[v] && self.settled[u] && self.window[u].is_some() {
                match groups.iter_mut().find(|(g, _, _)| *g == u) {
                    Some((_, _, edge)) => *edge = (*edge).min(e),
                    None => groups.push((u, self.flip_direction(u)?, e)),
                }
            }
        }
        groups.sort_unstable_by_key(|&(u, _, _)| u);
        Ok(groups)
    }

    fn scaled_parity(&self, value: i64) -> i64 {
        let rho = value.rem_euclid(self.step);
        ((value - rho) / self.step).rem_euclid(4)
    }

    /// Settles a non-final vertex: picks its window and induced weight from
    /// the values reachable via backward flips plus a one-step tweak of its
    /// first forward edge.
    pub fn settle_regular(&mut self, v: usize) -> Result<(), EngineError> {
        let groups = self.backward_groups(v)?;
        let first_forward = self.adjacency[v]
            .iter()
            .filter(|&&(u, _)| self.pos[u] > self.pos[v])
            .min_by_key(|&&(u, e)| (self.pos[u], e))
            .map(|&(_, e)| e)
            .ok_or(EngineError::NoForwardEdge(v))?;

        let positives = groups.iter().filter(|&&(_, d, _)| d > 0).count() as i64;
        let negatives = groups.len() as i64 - positives;
        let base = self.vertex_weight[v];
        let step = self.step;

        for k in -(2 * negatives + 1)..=(2 * positives + 1) {
            let x = base + step * k;
            let parity = self.scaled_parity(x);
            let (window_base, forward_tweaks): (i64, [i64; 2]) = if parity == 0 || parity == 1 {
                (x, [0, -1])
            } else {
                (x - 2 * step, [0, 1])
            };
            if groups
                .iter()
                .any(|&(u, _, _)| self.window[u] == Some(window_base))
            {
                continue;
            }
            let mut plan = None;
            for f in forward_tweaks {
                if (k - f).rem_euclid(2) != 0 {
                    continue;
                }
                let j = (k - f) / 2;
                if j < -negatives || j > positives {
                    continue;
                }
                plan = Some((j, f));
                break;
            }
            let Some((j, f)) = plan else { continue };
            let mut flips: Vec<usize> = Vec::new();
            if j > 0 {
                flips.extend(
                    groups
                        .iter()
                        .filter(|&&(_, d, _)| d > 0)
                        .take(j as usize)
                        .map(|&(_, _, e)| e),
                );
            } else if j < 0 {
                flips.extend(
                    groups
                        .iter()
                        .filter(|&&(_, d, _)| d < 0)
                        .take((-j) as usize)
                        .map(|&(_, _, e)| e),
                );
            }
            let dir = if j > 0 { 2 * step } else { -2 * step };
            for e in flips {
                self.apply(e, dir);
            }
            self.apply(first_forward, f * step);
            if self.vertex_weight[v] != x {
                return Err(EngineError::WindowViolated(v));
            }
            self.window[v] = Some(window_base);
            self.settled[v] = true;
            return Ok(());
        }
        Err(EngineError::NoOpenValue(v))
    }

    /// Settles the final vertex of a component using only backward flips;
    /// requires at least two distinct settled neighbors. The chosen value
    /// differs from the resulting weight of every flippable neighbor.
    pub fn settle_last(&mut self, v: usize) -> Result<(), EngineError> {
        let groups = self.backward_groups(v)?;
        if groups.len() < 2 {
            return Err(EngineError::DegreeTooLow(v, groups.len()));
        }
        let step = self.step;
        // All-low configuration: every neighbor on its window base.
        let all_low: i64 = self.vertex_weight[v]
            + groups
                .iter()
                .filter(|&&(_, d, _)| d < 0)
                .map(|_| -2 * step)
                .sum::<i64>();
        let parity = self.scaled_parity(all_low);
        // to_high[u]: neighbors to leave on base + 2*step.
        let mut to_high: Vec<usize> = Vec::new();
        if parity == 0 || parity == 1 {
            if let Some(&(u, _, _)) = groups
                .iter()
                .find(|&&(u, _, _)| self.window[u] != Some(all_low))
            {
                to_high.push(u);
            } else {
                to_high.push(groups[0].0);
                to_high.push(groups[1].0);
            }
        }
        for &(u, dir, e) in &groups {
            let high = to_high.contains(&u);
            let flip = if high { dir > 0 } else { dir < 0 };
            if flip {
                self.apply(e, dir);
            }
        }
        self.settled[v] = true;
        for &(u, _, _) in &groups {
            if self.vertex_weight[u] == self.vertex_weight[v] {
                return Err(EngineError::NoOpenValue(v));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::build_ordering;
    use crate::hypergraph::Hypergraph;
    use crate::weighting::{verify, InitialWeights, Weighting};

    fn run_seed_case(h: &Hypergraph, init: &[i64]) -> Vec<i64> {
        let ord = build_ordering(h).unwrap();
        assert!(ord.stall.is_none());
        assert!(ord.anchor.is_none());
        let mut lp = WeightLoop::new(h, init, 1, vec![3; h.m()], &ord.g_edges, &ord.pi);
        let n = ord.pi.len();
        for &v in &ord.pi[..n - 1] {
            lp.settle_regular(v).unwrap();
        }
        lp.settle_last(ord.pi[n - 1]).unwrap();
        lp.weights()
    }

    #[test]
    fn path_component_gets_proper_weighting_in_range() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let ws = run_seed_case(&h, &[0, 0, 0]);
        assert!(ws.iter().all(|&w| (1..=5).contains(&w)));
        let w = Weighting::new(ws).unwrap();
        assert!(verify(&h, &w, &InitialWeights::zero(3)).unwrap().proper);
    }

    #[test]
    fn triangle_component_weights_in_range() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let ws = run_seed_case(&h, &[0, 0, 0]);
        assert!(ws.iter().all(|&w| (1..=5).contains(&w)));
        let w = Weighting::new(ws).unwrap();
        assert!(verify(&h, &w, &InitialWeights::zero(3)).unwrap().proper);
    }

    #[test]
    fn star_center_differs_from_leaves() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let ws = run_seed_case(&h, &[0, 0, 0, 0]);
        let w = Weighting::new(ws.clone()).unwrap();
        let init = InitialWeights::zero(4);
        assert!(verify(&h, &w, &init).unwrap().proper);
        assert!(ws.iter().all(|&x| (1..=5).contains(&x)));
    }

    #[test]
    fn settled_windows_hold_after_every_step() {
        let h = Hypergraph::new(
            6,
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 5],
                vec![0, 5],
                vec![0, 2, 4],
            ],
        )
        .unwrap();
        let ord = build_ordering(&h).unwrap();
        assert!(ord.stall.is_none());
        let mut lp = WeightLoop::new(&h, &[0; 6], 1, vec![3; h.m()], &ord.g_edges, &ord.pi);
        let n = ord.pi.len();
        for &v in &ord.pi[..n - 1] {
            lp.settle_regular(v).unwrap();
            // Every settled vertex remains inside its window.
            for u in 0..h.n() {
                if let Some(win) = lp.window(u) {
                    assert!(win.contains(lp.vertex_weight(u)), "window broken at {u}");
                    assert!(win.base.rem_euclid(4) == 0 || win.base.rem_euclid(4) == 1);
                }
            }
            // Off-center derived edges with an unsettled later endpoint pin
            // their earlier endpoint: weight 2 on the base, 4 on base + 2.
            for ge in &ord.g_edges {
                if !lp.is_settled(ge.earlier) || lp.is_settled(ge.later) {
                    continue;
                }
                let w_e = lp.weight(ge.edge);
                let Some(win) = lp.window(ge.earlier) else { continue };
                match w_e {
                    2 => assert_eq!(lp.vertex_weight(ge.earlier), win.base),
                    4 => assert_eq!(lp.vertex_weight(ge.earlier), win.base + 2),
                    _ => assert_eq!(w_e, 3, "pending edge weight out of range"),
                }
            }
        }
        lp.settle_last(ord.pi[n - 1]).unwrap();
        let w = Weighting::new(lp.weights()).unwrap();
        assert!(verify(&h, &w, &InitialWeights::zero(6)).unwrap().proper);
        assert!(w.max_weight().unwrap() <= 5);
    }

    #[test]
    fn init_offsets_are_respected() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let init = [9, 0, 4];
        let ws = run_seed_case(&h, &init);
        let w = Weighting::new(ws).unwrap();
        let iw = InitialWeights::new(init.to_vec()).unwrap();
        assert!(verify(&h, &w, &iw).unwrap().proper);
    }

    #[test]
    fn scaled_step_keeps_residues() {
        // Two disjoint 2-edges joined by a 3-edge; force step 3 weighting.
        let h = Hypergraph::new(
            6,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5], vec![1, 3, 5]],
        )
        .unwrap();
        let ord = build_ordering(&h).unwrap();
        assert!(ord.stall.is_none());
        let step = 3;
        let centers = vec![2 * (step + 1) - 1; h.m()];
        let mut lp = WeightLoop::new(&h, &[0; 6], step, centers.clone(), &ord.g_edges, &ord.pi);
        let n = ord.pi.len();
        for &v in &ord.pi[..n - 1] {
            lp.settle_regular(v).unwrap();
        }
        lp.settle_last(ord.pi[n - 1]).unwrap();
        for e in 0..h.m() {
            let d = lp.weight(e) - centers[e];
            assert_eq!(d.rem_euclid(step), 0);
            assert!(d.abs() <= 2 * step);
        }
        let w = Weighting::new(lp.weights()).unwrap();
        assert!(verify(&h, &w, &InitialWeights::zero(6)).unwrap().proper);
    }
}
