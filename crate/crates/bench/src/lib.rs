//! Shared instance builders for the benchmark targets.

use hew_core::{random_hypergraph, random_linear_hypergraph, Hypergraph};

pub fn linear_instance(seed: u64) -> Hypergraph {
    random_linear_hypergraph(60, 80, 6, seed).expect("feasible parameters")
}

pub fn r3_instance(seed: u64) -> Hypergraph {
    random_hypergraph(40, 60, 3, seed).expect("feasible parameters")
}

pub fn general_instance(seed: u64) -> Hypergraph {
    random_hypergraph(40, 50, 8, seed).expect("feasible parameters")
}
