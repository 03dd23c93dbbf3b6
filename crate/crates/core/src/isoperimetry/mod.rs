//! Boundaries, Følner functions and isoperimetric constants by exhaustive
//! search, plus the configuration-graph combinatorics used to lift
//! isoperimetry from a base graph to its lamplighter wreath product.

mod config_graph;
mod enumerate;
mod folner;
mod graph;
mod prune;

pub use config_graph::{lemma_neud_check, ConfigurationGraph, NeudReport, Satisfiability};
pub use enumerate::{connected_subsets, MAX_VERTICES};
pub use folner::{
    folner_function, folner_lower_bound_check, isoperimetric_beta, isoperimetric_beta_exhaustive,
    profile_f, quasi_isometry_constants, write_profile_csv, BetaReport, FolnerCheck, FolnerEntry,
    FolnerValue, Verdict, WREATH_EXPONENT, WREATH_SCALE,
};
pub use graph::{BoundaryMode, IsoError, IsoGraph, SubsetSelection};
pub use prune::{
    flip_closure_bound_check, prune_to_satisfiable, unsatisfied_edge_fraction, FlipClosure, PruneResult,
};
