//! Pattern graphs, the color change rule and zero forcing.
//!
//! Node ids in this module are 1-based, matching the edge-list files and the usual way
//! these graphs are drawn. Matrix indices elsewhere in the crate are 0-based; node `k`
//! corresponds to row/column `k - 1`.

mod dot;
mod forcing;
mod witness;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::pattern::{PatternMatrix, PatternSymbol};

pub use dot::export_dot;
pub use forcing::{
    colorability, colorability_with_order, loopy_zero_forcing, ordinary_zero_forcing, run_forcing,
    ColorChange, ColorTrace, ForcerOrder, ForcingRule, TraceError,
};
pub use witness::{rank_deficiency_witness, RankWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    /// Edge from a `*` entry; may carry a color change.
    Star,
    /// Edge from a `?` entry; counts as an out-neighbor but never forces.
    Qmark,
}

/// `G(M)`: node `j` has an edge to node `i` whenever `M[i][j]` is not a fixed zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    node_count: usize,
    row_count: usize,
    e_star: BTreeSet<(usize, usize)>,
    e_qmark: BTreeSet<(usize, usize)>,
}

impl PatternGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Nodes `1..=row_count` are the row nodes; only they have incoming edges.
    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn star_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.e_star
    }

    pub fn qmark_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.e_qmark
    }

    pub fn forcing_graph(&self) -> ForcingGraph {
        let mut g = ForcingGraph::new(self.node_count);
        for &(u, v) in &self.e_star {
            g.add_edge(u - 1, v - 1, EdgeKind::Star);
        }
        for &(u, v) in &self.e_qmark {
            g.add_edge(u - 1, v - 1, EdgeKind::Qmark);
        }
        g
    }
}

fn require_tall_enough(m: &PatternMatrix) -> Result<()> {
    if m.rows() > m.cols() {
        return Err(Error::WideMatrixRequired {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

pub fn build_graph(m: &PatternMatrix) -> Result<PatternGraph> {
    require_tall_enough(m)?;
    let mut e_star = BTreeSet::new();
    let mut e_qmark = BTreeSet::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            match m.get(i, j) {
                PatternSymbol::FixedZero => {}
                PatternSymbol::Nonzero => {
                    e_star.insert((j + 1, i + 1));
                }
                PatternSymbol::Arbitrary => {
                    e_qmark.insert((j + 1, i + 1));
                }
            }
        }
    }
    Ok(PatternGraph {
        node_count: m.cols(),
        row_count: m.rows(),
        e_star,
        e_qmark,
    })
}

/// 0-based adjacency used by the forcing engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingGraph {
    out: Vec<Vec<(usize, EdgeKind)>>,
    inc: Vec<Vec<usize>>,
}

impl ForcingGraph {
    pub fn new(n: usize) -> Self {
        Self {
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
        }
    }

    /// Builds `G(M)` directly from a pattern, without the edge sets.
    pub fn from_pattern(m: &PatternMatrix) -> Self {
        let mut g = Self::new(m.cols());
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                match m.get(i, j) {
                    PatternSymbol::FixedZero => {}
                    PatternSymbol::Nonzero => g.add_edge(j, i, EdgeKind::Star),
                    PatternSymbol::Arbitrary => g.add_edge(j, i, EdgeKind::Qmark),
                }
            }
        }
        g
    }

    /// Adds `u -> v` (0-based). Parallel edges are the caller's problem.
    pub fn add_edge(&mut self, u: usize, v: usize, kind: EdgeKind) {
        self.out[u].push((v, kind));
        self.inc[v].push(u);
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn out_neighbors(&self, u: usize) -> &[(usize, EdgeKind)] {
        &self.out[u]
    }

    pub(crate) fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }
}

/// A plain directed graph on nodes `1..=node_count`, as used by zero forcing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        for &(u, v) in &edges {
            for w in [u, v] {
                if w == 0 || w > node_count {
                    return Err(Error::UnknownNode(w));
                }
            }
        }
        Ok(Self { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn self_loops(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(|(u, v)| u == v).map(|&(u, _)| u)
    }

    pub fn has_self_loops(&self) -> bool {
        self.self_loops().next().is_some()
    }

    /// The same graph with a self-loop at every node.
    pub fn with_all_loops(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.extend((1..=self.node_count).map(|i| (i, i)));
        Self {
            node_count: self.node_count,
            edges,
        }
    }

    pub fn forcing_graph(&self) -> ForcingGraph {
        let mut g = ForcingGraph::new(self.node_count);
        for &(u, v) in &self.edges {
            g.add_edge(u - 1, v - 1, EdgeKind::Star);
        }
        g
    }

    /// Parses an edge list: one `u v` per line, `#` comments, optional `nodes: N` header.
    /// Without the header the node count is the largest id mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let file = parse_edge_list(text)?;
        let mut n = file.max_node();
        for h in &file.headers {
            match h.key.as_str() {
                "nodes" => n = n.max(h.single_count()?),
                _ => {
                    return Err(ParseError::BadLine {
                        line: h.line,
                        message: format!("unknown header `{}`", h.key),
                    }
                    .into())
                }
            }
        }
        Self::new(n, file.edges)
    }
}

/// A `key: value` header line of an edge-list file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Header {
    pub fn numbers(&self) -> Result<Vec<usize>, ParseError> {
        self.value
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| ParseError::BadLine {
                    line: self.line,
                    message: format!("`{t}` is not a nonnegative integer"),
                })
            })
            .collect()
    }

    pub(crate) fn single_count(&self) -> Result<usize, ParseError> {
        match self.numbers()?.as_slice() {
            [n] => Ok(*n),
            _ => Err(ParseError::BadLine {
                line: self.line,
                message: format!("`{}:` takes exactly one number", self.key),
            }),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeListFile {
    pub headers: Vec<Header>,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeListFile {
    pub fn max_node(&self) -> usize {
        self.edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0)
    }
}

/// Splits an edge-list file into `key: value` headers and `u v` edges. Line numbers in
/// errors are 0-based.
pub fn parse_edge_list(text: &str) -> Result<EdgeListFile, ParseError> {
    let mut file = EdgeListFile::default();
    for (line, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((key, value)) = content.split_once(':') {
            file.headers.push(Header {
                line,
                key: key.trim().to_ascii_lowercase(),
                value: value.trim().to_string(),
            });
            continue;
        }
        let ids: Vec<&str> = content.split_whitespace().collect();
        let [u, v] = ids.as_slice() else {
            return Err(ParseError::BadLine {
                line,
                message: format!("expected `u v`, got `{content}`"),
            });
        };
        let parse = |t: &str| match t.parse::<usize>() {
            Ok(x) if x > 0 => Ok(x),
            _ => Err(ParseError::BadLine {
                line,
                message: format!("`{t}` is not a positive node id"),
            }),
        };
        file.edges.push((parse(u)?, parse(v)?));
    }
    Ok(file)
}
