//! Proper colorings as partitions into color classes.
//!
//! Classes are indexed from 0 internally; class `l` carries color `l + 1`,
//! so the coloring sum is `sum_l (l + 1) * |V_l|`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("expected {expected} vertex colors, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} has color 0; colors start at 1")]
    ZeroColor { vertex: usize },
    #[error("edge {{{u}, {v}}} is monochromatic")]
    Improper { u: usize, v: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringTextError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing `s <f> <k>` header")]
    MissingHeader,
    #[error("vertex {vertex} assigned twice")]
    DuplicateVertex { vertex: usize },
    #[error("vertex {vertex} has no color")]
    Incomplete { vertex: usize },
    #[error("header says f = {declared}, assignment sums to {actual}")]
    SumMismatch { declared: u64, actual: u64 },
    #[error(transparent)]
    Invalid(#[from] ColoringError),
}

/// A complete assignment of vertices to color classes.
///
/// Properness is an invariant of the search, not of this type: the
/// low-level [`move_vertex`](Self::move_vertex) does not consult the graph.
/// Every constructor that takes external input validates it.
#[derive(Clone, Debug)]
pub struct Coloring {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    slot: Vec<usize>,
    sum: u64,
}

impl PartialEq for Coloring {
    fn eq(&self, other: &Self) -> bool {
        self.class_of == other.class_of && self.classes.len() == other.classes.len()
    }
}

impl Eq for Coloring {}

impl Coloring {
    /// Validated constructor from 1-based colors, one per vertex.
    pub fn from_colors(g: &Graph, colors: &[usize]) -> Result<Self, ColoringError> {
        if colors.len() != g.n() {
            return Err(ColoringError::LengthMismatch {
                expected: g.n(),
                got: colors.len(),
            });
        }
        if let Some(v) = colors.iter().position(|&c| c == 0) {
            return Err(ColoringError::ZeroColor { vertex: v + 1 });
        }
        let c = Self::from_class_indices(colors.iter().map(|&c| c - 1).collect());
        if let Some((u, v)) = c.conflicting_edge(g) {
            return Err(ColoringError::Improper { u: u + 1, v: v + 1 });
        }
        Ok(c)
    }

    /// Builds a coloring from 0-based class indices without checking
    /// properness. The class count is `max + 1`.
    pub fn from_class_indices(class_of: Vec<usize>) -> Self {
        let k = class_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        Self::with_class_count(class_of, k)
    }

    /// Like [`from_class_indices`](Self::from_class_indices) but allocates
    /// exactly `k` classes, trailing ones possibly empty.
    pub fn with_class_count(class_of: Vec<usize>, k: usize) -> Self {
        let mut classes = vec![Vec::new(); k];
        let mut slot = vec![0; class_of.len()];
        let mut sum = 0u64;
        for (v, &c) in class_of.iter().enumerate() {
            assert!(c < k, "class {c} of vertex {v} not below k = {k}");
            slot[v] = classes[c].len();
            classes[c].push(v);
            sum += c as u64 + 1;
        }
        Self {
            class_of,
            classes,
            slot,
            sum,
        }
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    /// Allocated classes, empty ones included.
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// Classes with at least one vertex.
    pub fn used_colors(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_empty()).count()
    }

    #[inline]
    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// 1-based color of `v`.
    #[inline]
    pub fn color(&self, v: usize) -> usize {
        self.class_of[v] + 1
    }

    pub fn class_indices(&self) -> &[usize] {
        &self.class_of
    }

    /// 1-based colors, one per vertex.
    pub fn colors(&self) -> Vec<usize> {
        self.class_of.iter().map(|&c| c + 1).collect()
    }

    #[inline]
    pub fn class(&self, l: usize) -> &[usize] {
        &self.classes[l]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    #[inline]
    pub fn class_size(&self, l: usize) -> usize {
        self.classes[l].len()
    }

    /// The coloring sum `f`, maintained incrementally.
    #[inline]
    pub fn sum(&self) -> u64 {
        self.sum
    }

    /// `f` recomputed from the assignment.
    pub fn recompute_sum(&self) -> u64 {
        self.class_of.iter().map(|&c| c as u64 + 1).sum()
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.conflicting_edge(g).is_none()
    }

    /// First monochromatic edge, if any.
    pub fn conflicting_edge(&self, g: &Graph) -> Option<(usize, usize)> {
        g.edges()
            .find(|&(u, v)| self.class_of[u] == self.class_of[v])
    }

    /// Moves `v` into class `to`, keeping classes and `f` in sync.
    /// Does not check properness.
    pub fn move_vertex(&mut self, v: usize, to: usize) {
        let from = self.class_of[v];
        if from == to {
            return;
        }
        let pos = self.slot[v];
        let members = &mut self.classes[from];
        members.swap_remove(pos);
        if let Some(&moved) = members.get(pos) {
            self.slot[moved] = pos;
        }
        self.slot[v] = self.classes[to].len();
        self.classes[to].push(v);
        self.class_of[v] = to;
        self.sum = self.sum + to as u64 - from as u64;
    }

    /// Allocates a new empty class and returns its index.
    pub fn push_empty_class(&mut self) -> usize {
        self.classes.push(Vec::new());
        self.classes.len() - 1
    }

    /// Number of vertices whose colors differ.
    pub fn distance(&self, other: &Coloring) -> usize {
        assert_eq!(self.n(), other.n());
        self.class_of
            .iter()
            .zip(&other.class_of)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Relabels classes by non-increasing size and drops empty ones.
    ///
    /// Equal-size classes keep their relative order, so the result is
    /// deterministic. This minimizes `f` over all relabelings of the
    /// partition.
    pub fn canonical_relabel(&self) -> Coloring {
        let mut order: Vec<usize> = (0..self.k())
            .filter(|&l| !self.classes[l].is_empty())
            .collect();
        order.sort_by_key(|&l| std::cmp::Reverse(self.classes[l].len()));
        let mut new_label = vec![usize::MAX; self.k()];
        for (new, &old) in order.iter().enumerate() {
            new_label[old] = new;
        }
        let class_of = self.class_of.iter().map(|&c| new_label[c]).collect();
        Coloring::with_class_count(class_of, order.len())
    }

    /// Partition fingerprint: labels renumbered in order of first
    /// appearance. Two colorings describe the same partition iff their
    /// keys are equal.
    pub fn partition_key(&self) -> Vec<u32> {
        let mut map = vec![u32::MAX; self.k()];
        let mut next = 0u32;
        self.class_of
            .iter()
            .map(|&c| {
                if map[c] == u32::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect()
    }

    pub fn same_partition(&self, other: &Coloring) -> bool {
        self.n() == other.n() && self.partition_key() == other.partition_key()
    }

    /// Text form: `s <f> <k>` followed by `v <vertex> <color>` per vertex,
    /// both 1-based. `k` counts non-empty classes.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(12 * self.n() + 16);
        let _ = writeln!(out, "s {} {}", self.sum, self.used_colors());
        for (v, &c) in self.class_of.iter().enumerate() {
            let _ = writeln!(out, "v {} {}", v + 1, c + 1);
        }
        out
    }

    /// Parses the text form, rejecting incomplete, improper, or
    /// inconsistent assignments.
    pub fn parse_text(text: &str, g: &Graph) -> Result<Coloring, ColoringTextError> {
        let syntax = |line: usize, reason: &str| ColoringTextError::Syntax {
            line,
            reason: reason.to_string(),
        };
        let mut declared_sum = None;
        let mut colors: Vec<Option<usize>> = vec![None; g.n()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens.as_slice() {
                [] => {}
                ["c", ..] => {}
                ["s", f, _k] => {
                    if declared_sum.is_some() {
                        return Err(syntax(line, "second `s` line"));
                    }
                    declared_sum = Some(f.parse::<u64>().map_err(|_| syntax(line, "bad sum"))?);
                }
                ["v", v, c] => {
                    let v: usize = v.parse().map_err(|_| syntax(line, "bad vertex"))?;
                    let c: usize = c.parse().map_err(|_| syntax(line, "bad color"))?;
                    if v == 0 || v > g.n() {
                        return Err(syntax(line, "vertex out of range"));
                    }
                    if colors[v - 1].replace(c).is_some() {
                        return Err(ColoringTextError::DuplicateVertex { vertex: v });
                    }
                }
                _ => return Err(syntax(line, "unrecognized line")),
            }
        }
        let declared = declared_sum.ok_or(ColoringTextError::MissingHeader)?;
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or(ColoringTextError::Incomplete { vertex: v + 1 }))
            .collect::<Result<Vec<_>, _>>()?;
        let coloring = Coloring::from_colors(g, &colors)?;
        if coloring.sum() != declared {
            return Err(ColoringTextError::SumMismatch {
                declared,
                actual: coloring.sum(),
            });
        }
        Ok(coloring)
    }
}
