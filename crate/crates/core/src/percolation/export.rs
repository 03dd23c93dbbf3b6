use std::fmt::Write as _;

use thiserror::Error;

use super::cluster::{ClusterError, ClusterGraph};

#[derive(Debug, Error, PartialEq)]
pub enum ExportError {
    #[error("only lattice clusters carry coordinates")]
    NotLattice,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Parsed contents of a cluster export.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterExport {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub points: Vec<Vec<i32>>,
    pub edges: Vec<(usize, usize)>,
}

impl ClusterExport {
    /// The exported graph with its origin at the point `0`, or at vertex 0
    /// when the origin is absent.
    pub fn graph(&self) -> Result<ClusterGraph, ExportError> {
        let origin = self.points.iter().position(|x| x.iter().all(|&c| c == 0)).unwrap_or(0);
        Ok(ClusterGraph::from_edges(self.points.len(), &self.edges, origin)?)
    }
}

/// Writes the plain-text adjacency format:
///
/// ```text
/// d n p seed
/// id x1 .. xd      (one line per vertex)
/// id1 id2          (one line per edge, id1 < id2)
/// ```
pub fn write_cluster(cluster: &ClusterGraph, p: f64, seed: u64) -> Result<String, ExportError> {
    let spec = cluster.lattice().ok_or(ExportError::NotLattice)?;
    let mut out = String::new();
    writeln!(out, "{} {} {} {}", spec.dim(), spec.radius(), p, seed).unwrap();
    for v in 0..cluster.len() {
        write!(out, "{v}").unwrap();
        for x in cluster.point(v).expect("lattice cluster") {
            write!(out, " {x}").unwrap();
        }
        out.push('\n');
    }
    for (a, b) in cluster.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    Ok(out)
}

pub fn read_cluster(text: &str) -> Result<ClusterExport, ExportError> {
    let err = |line: usize, msg: &str| ExportError::Parse { line: line + 1, msg: msg.to_string() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| err(0, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(err(hl, "header must be `d n p seed`"));
    }
    let d: usize = fields[0].parse().map_err(|_| err(hl, "bad d"))?;
    let n: usize = fields[1].parse().map_err(|_| err(hl, "bad n"))?;
    let p: f64 = fields[2].parse().map_err(|_| err(hl, "bad p"))?;
    let seed: u64 = fields[3].parse().map_err(|_| err(hl, "bad seed"))?;

    let mut points = Vec::new();
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(ln, "expected integers"))?;
        if nums.len() == d + 1 && edges.is_empty() {
            if nums[0] as usize != points.len() {
                return Err(err(ln, "vertex ids must be consecutive from 0"));
            }
            points.push(nums[1..].iter().map(|&x| x as i32).collect());
        } else if nums.len() == 2 {
            let (a, b) = (nums[0], nums[1]);
            if a < 0 || b < 0 || a as usize >= points.len() || b as usize >= points.len() {
                return Err(err(ln, "edge endpoint is not a vertex"));
            }
            edges.push((a as usize, b as usize));
        } else {
            return Err(err(ln, "unexpected field count"));
        }
    }
    Ok(ClusterExport { d, n, p, seed, points, edges })
}
