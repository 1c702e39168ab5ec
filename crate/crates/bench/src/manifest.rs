//! Line-oriented instance manifests.
//!
//! Each non-comment line reads `name path n m sum_or_dash exact_or_ub k_or_dash`.
//! Paths are resolved against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use sumcol_core::Graph;

use crate::BenchError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRecord {
    pub name: String,
    pub path: PathBuf,
    pub n: usize,
    pub m: usize,
    /// Best known chromatic sum, if any.
    pub best_known_sum: Option<u64>,
    /// Whether `best_known_sum` is proven optimal rather than an upper bound.
    pub bound_is_exact: bool,
    /// Best known number of colors, if any.
    pub gcp_k: Option<usize>,
}

impl InstanceRecord {
    /// A record for a bare graph file with no known bounds.
    pub fn from_graph(name: &str, path: &Path, g: &Graph) -> Self {
        Self {
            name: name.to_string(),
            path: path.to_path_buf(),
            n: g.n(),
            m: g.edge_count(),
            best_known_sum: None,
            bound_is_exact: false,
            gcp_k: None,
        }
    }

    /// Parses the instance file and checks it against the recorded size.
    pub fn load_graph(&self) -> Result<Graph, BenchError> {
        let text = fs::read_to_string(&self.path).map_err(|e| BenchError::Io {
            path: self.path.clone(),
            source: e,
        })?;
        let (g, _) = Graph::parse_dimacs(&text).map_err(|e| BenchError::Graph {
            path: self.path.clone(),
            source: e,
        })?;
        if g.n() != self.n || g.edge_count() != self.m {
            return Err(BenchError::SizeMismatch {
                name: self.name.clone(),
                expected: (self.n, self.m),
                found: (g.n(), g.edge_count()),
            });
        }
        Ok(g)
    }
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<InstanceRecord>, BenchError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let bad = |reason: &str| BenchError::Manifest {
            line: lineno,
            reason: reason.to_string(),
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let n = f[2].parse().map_err(|_| bad("n is not an integer"))?;
        let m = f[3].parse().map_err(|_| bad("m is not an integer"))?;
        let best_known_sum = match f[4] {
            "-" | "--" => None,
            s => Some(s.parse().map_err(|_| bad("sum is not an integer"))?),
        };
        let bound_is_exact = match f[5] {
            "exact" => true,
            "ub" | "-" | "--" => false,
            _ => return Err(bad("bound kind must be exact, ub or -")),
        };
        let gcp_k = match f[6] {
            "-" | "--" => None,
            s => Some(s.parse().map_err(|_| bad("k is not an integer"))?),
        };
        out.push(InstanceRecord {
            name: f[0].to_string(),
            path: base.join(f[1]),
            n,
            m,
            best_known_sum,
            bound_is_exact,
            gcp_k,
        });
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> Result<Vec<InstanceRecord>, BenchError> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))
}
