//! Random walks on supercritical bond-percolation clusters.
//!
//! The crate estimates `E[α^{N_n}]` (the Laplace transform of the number of
//! distinct sites visited by a simple random walk), checks the lamplighter
//! return-probability identity exactly on small clusters, computes Følner
//! functions and isoperimetric constants by exhaustive search, and evaluates
//! the Nash-type and spectral machinery behind the `n^{d/(d+2)}` decay rate.
//!
//! Modules follow the pipeline:
//!
//! - [`percolation`]: lattice boxes, seeded bond configurations, clusters,
//!   chemical distance, renormalized good/bad blocks.
//! - [`walk`]: simple random walk, visited-site statistics, exact and Monte
//!   Carlo Laplace transforms, the killed walk on chemical balls.
//! - [`wreath`]: finite wreath products with `Z/2Z` lamps and the lamplighter
//!   kernel.
//! - [`isoperimetry`]: boundaries, Følner functions, configuration graphs and
//!   the combinatorial lemmas used to lift isoperimetry to the wreath product.
//! - [`bounds`]: the Nash ODE, lower-bound assembly and exponent fitting.
//! - [`harness`]: experiment recipes and report emission for the CLI.

pub mod bounds;
pub mod harness;
pub mod isoperimetry;
pub mod percolation;
pub mod rng;
pub mod walk;
pub mod wreath;

pub use percolation::{BondConfiguration, ClusterGraph, LatticeSpec};
pub use walk::{WalkPath, WalkSeries};
pub use wreath::{LamplighterKernel, WreathGraph};


