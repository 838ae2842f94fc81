//! Edge weightings, induced vertex weights and the properness verifier.
//!
//! A weighting is vertex-coloring when the induced vertex weights
//! `w(v) = init(v) + sum of weights of edges containing v` leave no edge
//! monochromatic.

use crate::hypergraph::Hypergraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightingError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight at index {0} must be >= 1")]
    NonPositiveWeight(usize),
    #[error("initial weight at vertex {0} must be >= 0")]
    NegativeInitial(usize),
    #[error("empty weighting has no maximum")]
    Empty,
    #[error("arithmetic overflow while summing vertex weights")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Positive integer weights, one per edge index of a host hypergraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weighting {
    weights: Vec<i64>,
}

impl Weighting {
    pub fn new(weights: Vec<i64>) -> Result<Self, WeightingError> {
        if let Some(i) = weights.iter().position(|&w| w < 1) {
            return Err(WeightingError::NonPositiveWeight(i));
        }
        Ok(Weighting { weights })
    }

    pub fn values(&self) -> &[i64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, e: usize) -> i64 {
        self.weights[e]
    }

    /// Maximum entry; errors on an empty weighting.
    pub fn max_weight(&self) -> Result<i64, WeightingError> {
        self.weights.iter().copied().max().ok_or(WeightingError::Empty)
    }

    pub fn min_weight(&self) -> Result<i64, WeightingError> {
        self.weights.iter().copied().min().ok_or(WeightingError::Empty)
    }

    /// Parses either the text form (lines of `edge_index weight`) or the
    /// JSON form `{"weights":[...]}`. Text lines starting with `#` are
    /// comments. Every edge index in `0..m` must be assigned exactly once.
    pub fn parse(text: &str, m: usize) -> Result<Self, WeightingError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Wire {
                weights: Vec<i64>,
            }
            let wire: Wire = serde_json::from_str(trimmed)
                .map_err(|e| WeightingError::Parse(e.to_string()))?;
            if wire.weights.len() != m {
                return Err(WeightingError::LengthMismatch {
                    expected: m,
                    got: wire.weights.len(),
                });
            }
            return Weighting::new(wire.weights);
        }
        let mut weights = vec![None; m];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let idx: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| WeightingError::Parse(format!("bad edge index in '{line}'")))?;
            let w: i64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| WeightingError::Parse(format!("bad weight in '{line}'")))?;
            if idx >= m {
                return Err(WeightingError::Parse(format!(
                    "edge index {idx} out of range (m = {m})"
                )));
            }
            weights[idx] = Some(w);
        }
        let collected: Option<Vec<i64>> = weights.into_iter().collect();
        match collected {
            Some(ws) => Weighting::new(ws),
            None => Err(WeightingError::Parse("missing edge index".into())),
        }
    }

    /// Text form: one `edge_index weight` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{i} {w}\n"));
        }
        out
    }
}

/// Nonnegative per-vertex initial weights, the strengthened-statement input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialWeights {
    values: Vec<i64>,
}

impl InitialWeights {
    pub fn new(values: Vec<i64>) -> Result<Self, WeightingError> {
        if let Some(i) = values.iter().position(|&w| w < 0) {
            return Err(WeightingError::NegativeInitial(i));
        }
        Ok(InitialWeights { values })
    }

    pub fn zero(n: usize) -> Self {
        InitialWeights { values: vec![0; n] }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, v: usize) -> i64 {
        self.values[v]
    }

    pub fn parse(text: &str, n: usize) -> Result<Self, WeightingError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Wire {
                weights: Vec<i64>,
            }
            let wire: Wire = serde_json::from_str(trimmed)
                .map_err(|e| WeightingError::Parse(e.to_string()))?;
            if wire.weights.len() != n {
                return Err(WeightingError::LengthMismatch {
                    expected: n,
                    got: wire.weights.len(),
                });
            }
            return InitialWeights::new(wire.weights);
        }
        let mut values = vec![0i64; n];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let idx: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| WeightingError::Parse(format!("bad vertex index in '{line}'")))?;
            let w: i64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| WeightingError::Parse(format!("bad weight in '{line}'")))?;
            if idx >= n {
                return Err(WeightingError::Parse(format!(
                    "vertex index {idx} out of range (n = {n})"
                )));
            }
            values[idx] = w;
        }
        InitialWeights::new(values)
    }
}

/// Per-vertex induced weights `w(v) = init(v) + sum over edges containing v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedColoring {
    values: Vec<i64>,
}

impl InducedColoring {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, v: usize) -> i64 {
        self.values[v]
    }
}

/// Computes induced vertex weights with checked arithmetic; duplicate edges
/// contribute once per copy.
pub fn induced_vertex_weights(
    h: &Hypergraph,
    w: &Weighting,
    init: &InitialWeights,
) -> Result<InducedColoring, WeightingError> {
    if w.len() != h.m() {
        return Err(WeightingError::LengthMismatch {
            expected: h.m(),
            got: w.len(),
        });
    }
    if init.values().len() != h.n() {
        return Err(WeightingError::LengthMismatch {
            expected: h.n(),
            got: init.values().len(),
        });
    }
    let mut values = init.values().to_vec();
    for (i, e) in h.edges().iter().enumerate() {
        let we = w.get(i);
        for &v in e {
            values[v] = values[v].checked_add(we).ok_or(WeightingError::Overflow)?;
        }
    }
    Ok(InducedColoring { values })
}

/// True iff no edge is monochromatic. Edges of size <= 1 are always
/// monochromatic; an edgeless hypergraph is vacuously proper.
pub fn is_proper(h: &Hypergraph, coloring: &InducedColoring) -> Result<bool, WeightingError> {
    if coloring.values().len() != h.n() {
        return Err(WeightingError::LengthMismatch {
            expected: h.n(),
            got: coloring.values().len(),
        });
    }
    Ok(h.edges().iter().all(|e| !edge_monochromatic(e, coloring.values())))
}

pub(crate) fn edge_monochromatic(e: &[usize], values: &[i64]) -> bool {
    match e.first() {
        None => true,
        Some(&v0) => e.len() == 1 || e[1..].iter().all(|&v| values[v] == values[v0]),
    }
}

/// Verification outcome: `proper` iff `monochromatic` is empty; the list
/// holds exactly the monochromatic edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub proper: bool,
    pub monochromatic: Vec<usize>,
}

pub fn verify(
    h: &Hypergraph,
    w: &Weighting,
    init: &InitialWeights,
) -> Result<VerifyReport, WeightingError> {
    let coloring = induced_vertex_weights(h, w, init)?;
    let monochromatic: Vec<usize> = h
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| edge_monochromatic(e, coloring.values()))
        .map(|(i, _)| i)
        .collect();
    Ok(VerifyReport {
        proper: monochromatic.is_empty(),
        monochromatic,
    })
}
