//! Wreath products `A ≀ Z/2Z` of a small base graph with two-state lamps,
//! and the lamplighter walk whose return probability encodes `E[α^{N_n}]`.

mod bases;
mod graph;
mod identity;
mod kernel;

pub use bases::{hand_built_bases, rooted_canonical_form, small_lattice_clusters, sweep_bases};
pub use graph::{WreathError, WreathGraph, MAX_BASE};
pub use identity::{identity_sweep, verify_identity, write_sweep_csv, IdentityCheck, SweepRow};
pub use kernel::{LamplighterKernel, ReversibleMeasure};
