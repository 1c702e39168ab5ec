//! Simple undirected graphs and the DIMACS `.col` reader.
//!
//! Vertices are `0..n` internally; DIMACS files and every other external
//! format number them `1..=n`.

use std::io::{self, BufRead};

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: I/O error: {source}")]
    Io {
        line: usize,
        #[source]
        source: io::Error,
    },
    #[error("no `p edge <n> <m>` line")]
    MissingProblemLine,
    #[error("line {line}: duplicate problem line")]
    DuplicateProblemLine { line: usize },
    #[error("line {line}: malformed problem line")]
    MalformedProblemLine { line: usize },
    #[error("line {line}: edge line before the problem line")]
    EdgeBeforeProblemLine { line: usize },
    #[error("line {line}: expected an integer, found `{token}`")]
    NotAnInteger { line: usize, token: String },
    #[error("line {line}: malformed edge line")]
    MalformedEdgeLine { line: usize },
    #[error("line {line}: endpoint {vertex} outside 1..={n}")]
    EndpointOutOfRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: unknown line type `{tag}`")]
    UnknownLine { line: usize, tag: String },
}

/// Things the parser tolerated without failing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub self_loops: usize,
    pub duplicate_edges: usize,
    /// Edge count announced on the `p` line.
    pub declared_edges: usize,
}

impl ParseDiagnostics {
    /// True when the `p` line disagrees with the deduplicated edge set.
    pub fn edge_count_mismatch(&self, actual: usize) -> bool {
        self.declared_edges != actual
    }
}

/// Immutable simple undirected graph.
///
/// Adjacency is kept twice: a bit row per vertex for constant-time
/// membership and a sorted neighbor list for iteration.
#[derive(Clone, Debug)]
pub struct Graph {
    rows: Vec<FixedBitSet>,
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.neighbors == other.neighbors
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from 0-based edges, dropping self-loops and duplicates.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut builder = Builder::new(n);
        for (u, v) in edges {
            builder.add(u, v);
        }
        builder.finish()
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn row(&self, v: usize) -> &FixedBitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Parses DIMACS `.col` text. See [`parse_dimacs_reader`](Self::parse_dimacs_reader).
    pub fn parse_dimacs(text: &str) -> Result<(Graph, ParseDiagnostics), ParseError> {
        Self::parse_dimacs_reader(text.as_bytes())
    }

    /// Reads a DIMACS `.col` stream.
    ///
    /// Self-loops are dropped and duplicate edges (in either orientation)
    /// merged; both are counted in the returned diagnostics.
    pub fn parse_dimacs_reader<R: BufRead>(
        reader: R,
    ) -> Result<(Graph, ParseDiagnostics), ParseError> {
        let mut builder: Option<Builder> = None;
        let mut diag = ParseDiagnostics::default();

        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|source| ParseError::Io {
                line: line_no,
                source,
            })?;
            let mut tokens = line.split_whitespace();
            let Some(tag) = tokens.next() else {
                continue;
            };
            match tag {
                "c" => {}
                "p" => {
                    if builder.is_some() {
                        return Err(ParseError::DuplicateProblemLine { line: line_no });
                    }
                    let rest: Vec<&str> = tokens.collect();
                    if rest.len() != 3 || !matches!(rest[0], "edge" | "edges" | "col") {
                        return Err(ParseError::MalformedProblemLine { line: line_no });
                    }
                    let n = parse_int(rest[1], line_no)? as usize;
                    diag.declared_edges = parse_int(rest[2], line_no)? as usize;
                    builder = Some(Builder::new(n));
                }
                "e" => {
                    let Some(b) = builder.as_mut() else {
                        return Err(ParseError::EdgeBeforeProblemLine { line: line_no });
                    };
                    let rest: Vec<&str> = tokens.collect();
                    if rest.len() != 2 {
                        return Err(ParseError::MalformedEdgeLine { line: line_no });
                    }
                    let mut ends = [0usize; 2];
                    for (slot, tok) in ends.iter_mut().zip(&rest) {
                        let x = parse_int(tok, line_no)?;
                        if x == 0 || x as usize > b.n {
                            return Err(ParseError::EndpointOutOfRange {
                                line: line_no,
                                vertex: x,
                                n: b.n,
                            });
                        }
                        *slot = x as usize - 1;
                    }
                    match b.add(ends[0], ends[1]) {
                        Added::New => {}
                        Added::Duplicate => diag.duplicate_edges += 1,
                        Added::SelfLoop => diag.self_loops += 1,
                    }
                }
                other => {
                    return Err(ParseError::UnknownLine {
                        line: line_no,
                        tag: other.to_string(),
                    })
                }
            }
        }

        let builder = builder.ok_or(ParseError::MissingProblemLine)?;
        Ok((builder.finish(), diag))
    }

    /// Writes the graph back out in DIMACS form.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n(), self.edge_count);
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Connected components of the subgraph induced by `subset`, singletons
    /// included. Components come out in order of their smallest member as
    /// encountered in `subset`; vertices within a component in BFS order.
    pub fn connected_components(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = FixedBitSet::with_capacity(self.n());
        for &v in subset {
            inside.insert(v);
        }
        let mut seen = FixedBitSet::with_capacity(self.n());
        let mut components = Vec::new();
        for &start in subset {
            if seen.put(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.neighbors[u] {
                    if inside.contains(w) && !seen.put(w) {
                        comp.push(w);
                    }
                }
            }
            components.push(comp);
        }
        components
    }
}

fn parse_int(token: &str, line: usize) -> Result<u64, ParseError> {
    token.parse().map_err(|_| ParseError::NotAnInteger {
        line,
        token: token.to_string(),
    })
}

enum Added {
    New,
    Duplicate,
    SelfLoop,
}

struct Builder {
    n: usize,
    rows: Vec<FixedBitSet>,
    edge_count: usize,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self {
            n,
            rows: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            edge_count: 0,
        }
    }

    fn add(&mut self, u: usize, v: usize) -> Added {
        assert!(
            u < self.n && v < self.n,
            "edge ({u}, {v}) outside 0..{}",
            self.n
        );
        if u == v {
            return Added::SelfLoop;
        }
        if self.rows[u].put(v) {
            return Added::Duplicate;
        }
        self.rows[v].insert(u);
        self.edge_count += 1;
        Added::New
    }

    fn finish(self) -> Graph {
        let neighbors = self.rows.iter().map(|r| r.ones().collect()).collect();
        Graph {
            rows: self.rows,
            neighbors,
            edge_count: self.edge_count,
        }
    }
}
