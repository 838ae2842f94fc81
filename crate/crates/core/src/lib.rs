//! Vertex-coloring edge weightings for hypergraphs.
//!
//! An edge weighting is vertex-coloring when the induced vertex weights
//! (each vertex summing the weights of its edges) leave no edge
//! monochromatic. The crate provides:
//!
//! - [`hypergraph`]: the immutable data model, structural predicates, and
//!   the two reduction operators (vertex deletion, induced subhypergraph);
//! - [`weighting`]: induced weights and the properness verifier;
//! - [`derive`](mod@derive): vertex orderings and the derived graph feeding the
//!   constructive solvers;
//! - [`solver`]: three constructive solvers with budgets max(5, r+1) for
//!   linear hypergraphs, 5 for edges of size at most 3, and 5r-5 in
//!   general, where r is the maximum edge size;
//! - [`oracle`]: exact backtracking search for the minimal feasible
//!   maximum weight, the ground truth on small instances;
//! - [`construct`]: the incidence construction behind the lower bounds and
//!   seeded random instance generators.

pub mod construct;
pub mod derive;
pub mod hypergraph;
pub mod oracle;
pub mod solver;
pub mod weighting;

pub use construct::{
    complete_graph, cycle_graph, fano_plane, incidence_hypergraph, random_hypergraph,
    random_linear_hypergraph, IncidenceLabel, SplitMix64,
};
pub use derive::{
    build_ordering, solve_general_ordering, strip_non_2edge_vertices, DerivedOrdering,
};
pub use hypergraph::{Hypergraph, HypergraphError, ReductionMap, VertexSet};
pub use oracle::{
    check_lower_bound_claim, chromatic_number, exists_weighting, min_max_weight, Feasibility,
    OracleOutcome, OracleResult, SearchLimits,
};
pub use solver::{
    solve, solve_general, solve_linear, solve_r3, SolveError, SolveMode, SolveOptions,
    SolveReport,
};
pub use weighting::{
    induced_vertex_weights, is_proper, verify, InducedColoring, InitialWeights, VerifyReport,
    Weighting,
};
