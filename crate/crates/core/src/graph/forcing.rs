use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{require_tall_enough, Digraph, EdgeKind, ForcingGraph};
use crate::error::{Error, Result};
use crate::pattern::PatternMatrix;

/// `forcer` colored `forced` black. Both ids are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ColorChange {
    pub forcer: usize,
    pub forced: usize,
}

impl fmt::Display for ColorChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {} colors {}", self.forcer, self.forced)
    }
}

/// Chronological list of color changes together with the resulting black set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ColorTrace {
    /// Nodes black before the first change (empty for pattern colorability).
    pub initial_black: Vec<usize>,
    pub changes: Vec<ColorChange>,
    pub final_black: Vec<usize>,
}

impl ColorTrace {
    pub fn forced_nodes(&self) -> BTreeSet<usize> {
        self.changes.iter().map(|c| c.forced).collect()
    }

    /// Replays the trace from its initial coloring, checking every change against the
    /// rule at the moment it is applied, and checks `final_black`.
    pub fn replay(&self, graph: &ForcingGraph, rule: &ForcingRule) -> Result<(), TraceError> {
        let n = graph.node_count();
        let mut black = vec![false; n];
        for &v in &self.initial_black {
            if v == 0 || v > n {
                return Err(TraceError::UnknownNode(v));
            }
            black[v - 1] = true;
        }
        for (step, c) in self.changes.iter().enumerate() {
            if c.forcer == 0 || c.forcer > n || c.forced == 0 || c.forced > n {
                return Err(TraceError::UnknownNode(c.forcer.max(c.forced)));
            }
            let (i, j) = (c.forcer - 1, c.forced - 1);
            let white: Vec<&(usize, EdgeKind)> = graph
                .out_neighbors(i)
                .iter()
                .filter(|(w, _)| !black[*w])
                .collect();
            let ok = white.len() == 1
                && white[0].0 == j
                && white[0].1 == EdgeKind::Star
                && (black[i] || !rule.black_forcer_only)
                && !(i == j && rule.is_forbidden_self_force(i));
            if !ok {
                return Err(TraceError::IllegalChange { step, change: *c });
            }
            black[j] = true;
        }
        let expected: Vec<usize> = (1..=n).filter(|&v| black[v - 1]).collect();
        if expected != self.final_black {
            return Err(TraceError::FinalBlackMismatch);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {step}: `{change}` violates the color change rule")]
    IllegalChange { step: usize, change: ColorChange },
    #[error("final black set does not match the replayed coloring")]
    FinalBlackMismatch,
    #[error("node {0} does not exist")]
    UnknownNode(usize),
}

/// Variant of the color change rule.
///
/// In every variant a forcer needs exactly one white out-neighbor, reached through a
/// `*` edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForcingRule {
    /// Only black nodes may force (ordinary zero forcing).
    pub black_forcer_only: bool,
    /// 0-based nodes that may not force themselves.
    pub forbidden_self_force: BTreeSet<usize>,
}

impl ForcingRule {
    pub fn any_color() -> Self {
        Self::default()
    }

    pub fn black_only() -> Self {
        Self {
            black_forcer_only: true,
            ..Self::default()
        }
    }

    fn is_forbidden_self_force(&self, node: usize) -> bool {
        self.forbidden_self_force.contains(&node)
    }
}

/// Which applicable change fires next.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum ForcerOrder {
    /// Smallest forced node first; among its forcers black ones before white ones, then
    /// the smallest id.
    #[default]
    Canonical,
    /// `rank[v]` (0-based node) orders forcers; lower rank fires first.
    Ranked(Vec<usize>),
}

impl ForcerOrder {
    fn key(&self, forcer: usize, forced: usize, forcer_black: bool) -> (usize, usize, usize) {
        match self {
            Self::Canonical => (forced, usize::from(!forcer_black), forcer),
            Self::Ranked(rank) => (rank[forcer], forced, 0),
        }
    }
}

/// Runs the rule from `initial_black` (0-based) until no change applies. Returns the
/// black mask and the trace. One change fires per step; the scan restarts afterwards.
pub fn run_forcing(
    graph: &ForcingGraph,
    initial_black: &[usize],
    rule: &ForcingRule,
    order: &ForcerOrder,
) -> (Vec<bool>, ColorTrace) {
    let n = graph.node_count();
    let mut black = vec![false; n];
    for &v in initial_black {
        black[v] = true;
    }
    let mut white_out: Vec<usize> = (0..n)
        .map(|u| {
            graph
                .out_neighbors(u)
                .iter()
                .filter(|(w, _)| !black[*w])
                .count()
        })
        .collect();
    let mut changes = Vec::new();
    loop {
        let mut best: Option<((usize, usize, usize), usize, usize)> = None;
        for i in 0..n {
            if white_out[i] != 1 || (rule.black_forcer_only && !black[i]) {
                continue;
            }
            let &(j, kind) = graph
                .out_neighbors(i)
                .iter()
                .find(|(w, _)| !black[*w])
                .expect("counter says one white out-neighbor");
            if kind != EdgeKind::Star || (i == j && rule.is_forbidden_self_force(i)) {
                continue;
            }
            let key = order.key(i, j, black[i]);
            if best.is_none_or(|(k, _, _)| key < k) {
                best = Some((key, i, j));
            }
        }
        let Some((_, i, j)) = best else { break };
        black[j] = true;
        for &u in graph.in_neighbors(j) {
            white_out[u] -= 1;
        }
        changes.push(ColorChange {
            forcer: i + 1,
            forced: j + 1,
        });
    }
    let mut init: Vec<usize> = initial_black.iter().map(|v| v + 1).collect();
    init.sort_unstable();
    init.dedup();
    let final_black = (0..n).filter(|&v| black[v]).map(|v| v + 1).collect();
    (
        black,
        ColorTrace {
            initial_black: init,
            changes,
            final_black,
        },
    )
}

/// Decides whether `G(M)` is colorable, i.e. whether the rule started from an all-white
/// graph turns every row node black.
pub fn colorability(m: &PatternMatrix) -> Result<(bool, ColorTrace)> {
    colorability_with_order(m, &ForcerOrder::Canonical)
}

pub fn colorability_with_order(
    m: &PatternMatrix,
    order: &ForcerOrder,
) -> Result<(bool, ColorTrace)> {
    require_tall_enough(m)?;
    let graph = ForcingGraph::from_pattern(m);
    let (black, trace) = run_forcing(&graph, &[], &ForcingRule::any_color(), order);
    Ok((black[..m.rows()].iter().all(|&b| b), trace))
}

fn leader_indices(h: &Digraph, s: &BTreeSet<usize>) -> Result<Vec<usize>> {
    s.iter()
        .map(|&v| {
            if v == 0 || v > h.node_count() {
                Err(Error::UnknownNode(v))
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

/// Loopy zero forcing: a node of any color with exactly one white out-neighbor forces it.
pub fn loopy_zero_forcing(h: &Digraph, s: &BTreeSet<usize>) -> Result<(bool, ColorTrace)> {
    let start = leader_indices(h, s)?;
    let (black, trace) = run_forcing(
        &h.forcing_graph(),
        &start,
        &ForcingRule::any_color(),
        &ForcerOrder::Canonical,
    );
    Ok((black.iter().all(|&b| b), trace))
}

/// Ordinary zero forcing on a loop-free graph: only black nodes force.
pub fn ordinary_zero_forcing(h: &Digraph, s: &BTreeSet<usize>) -> Result<(bool, ColorTrace)> {
    if let Some(v) = h.self_loops().next() {
        return Err(Error::SelfLoopForbidden(v));
    }
    let start = leader_indices(h, s)?;
    let (black, trace) = run_forcing(
        &h.forcing_graph(),
        &start,
        &ForcingRule::black_only(),
        &ForcerOrder::Canonical,
    );
    Ok((black.iter().all(|&b| b), trace))
}
