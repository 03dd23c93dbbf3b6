//! Lattice boxes, Bernoulli bond percolation and the clusters it produces.

mod cluster;
mod config;
mod export;
mod lattice;
mod renorm;

pub use cluster::{ClusterError, ClusterGraph, VolumeRatio};
pub use config::{BondConfiguration, ConfigError};
pub use export::{read_cluster, write_cluster, ClusterExport, ExportError};
pub use lattice::{LatticeError, LatticeSpec};
pub use renorm::{classify_boxes, BlockClass, BlockReport, RenormError, RenormalizedField};
