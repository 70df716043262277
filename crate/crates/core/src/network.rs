//! Leader-follower networks, their pattern systems, and the zero forcing characterizations.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::analysis::is_strongly_controllable;
use crate::error::{Error, ParseError, Result};
use crate::exec::{map_range, Execution};
use crate::graph::{
    loopy_zero_forcing, ordinary_zero_forcing, parse_edge_list, run_forcing, Digraph, ForcerOrder,
    ForcingRule,
};
use crate::pattern::{PatternMatrix, PatternSymbol, StructuredSystem};

/// A digraph `H` together with the leader nodes that receive inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeaderNetwork {
    graph: Digraph,
    leaders: Vec<usize>,
}

impl LeaderNetwork {
    /// Leaders must be distinct nodes of `graph`; their order fixes the column order of `B`.
    pub fn new(graph: Digraph, leaders: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &w in &leaders {
            if w == 0 || w > graph.node_count() {
                return Err(Error::InvalidLeaders(format!(
                    "node {w} is not in 1..={}",
                    graph.node_count()
                )));
            }
            if !seen.insert(w) {
                return Err(Error::InvalidLeaders(format!("node {w} listed twice")));
            }
        }
        Ok(Self { graph, leaders })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn leader_set(&self) -> BTreeSet<usize> {
        self.leaders.iter().copied().collect()
    }
}

/// Which pattern construction a network file asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkFamily {
    /// Self-loops allowed; `A` has `*` exactly on the edges.
    Star,
    /// Self-loops forbidden; `A` has `?` on the whole diagonal.
    Qdiag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkFile {
    pub network: LeaderNetwork,
    pub family: NetworkFamily,
}

/// Parses an edge list with a `leaders:` header, an optional `nodes:` header and an
/// optional `loops: allowed|forbidden` header (default `allowed`).
pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let file = parse_edge_list(text)?;
    let mut n = file.max_node();
    let mut leaders = None;
    let mut family = NetworkFamily::Star;
    for h in &file.headers {
        match h.key.as_str() {
            "nodes" => n = n.max(h.single_count()?),
            "leaders" => leaders = Some(h.numbers()?),
            "loops" => {
                family = match h.value.to_ascii_lowercase().as_str() {
                    "allowed" => NetworkFamily::Star,
                    "forbidden" => NetworkFamily::Qdiag,
                    other => {
                        return Err(ParseError::BadLine {
                            line: h.line,
                            message: format!(
                                "`loops:` must be `allowed` or `forbidden`, got `{other}`"
                            ),
                        }
                        .into())
                    }
                }
            }
            other => {
                return Err(ParseError::BadLine {
                    line: h.line,
                    message: format!("unknown header `{other}`"),
                }
                .into())
            }
        }
    }
    let leaders =
        leaders.ok_or_else(|| Error::InvalidLeaders("missing `leaders:` header".into()))?;
    n = n.max(leaders.iter().copied().max().unwrap_or(0));
    let graph = Digraph::new(n, file.edges)?;
    if family == NetworkFamily::Qdiag {
        if let Some(v) = graph.self_loops().next() {
            return Err(Error::SelfLoopForbidden(v));
        }
    }
    Ok(NetworkFile {
        network: LeaderNetwork::new(graph, leaders)?,
        family,
    })
}

fn leader_input_pattern(net: &LeaderNetwork) -> PatternMatrix {
    PatternMatrix::from_fn(net.node_count(), net.leaders.len(), |i, j| {
        if net.leaders[j] == i + 1 {
            PatternSymbol::Nonzero
        } else {
            PatternSymbol::FixedZero
        }
    })
}

/// `A[i][j] = *` iff `(j, i)` is an edge; `B[i][k] = *` iff node `i` is the `k`-th leader.
pub fn pattern_from_network_star(net: &LeaderNetwork) -> StructuredSystem {
    let n = net.node_count();
    let a = PatternMatrix::from_fn(n, n, |i, j| {
        if net.graph.has_edge(j + 1, i + 1) {
            PatternSymbol::Nonzero
        } else {
            PatternSymbol::FixedZero
        }
    });
    StructuredSystem::new(a, leader_input_pattern(net)).expect("consistent shapes")
}

/// As [`pattern_from_network_star`] but with `?` on the whole diagonal of `A`.
pub fn pattern_from_network_qdiag(net: &LeaderNetwork) -> Result<StructuredSystem> {
    if let Some(v) = net.graph.self_loops().next() {
        return Err(Error::SelfLoopForbidden(v));
    }
    let n = net.node_count();
    let a = PatternMatrix::from_fn(n, n, |i, j| {
        if i == j {
            PatternSymbol::Arbitrary
        } else if net.graph.has_edge(j + 1, i + 1) {
            PatternSymbol::Nonzero
        } else {
            PatternSymbol::FixedZero
        }
    });
    Ok(StructuredSystem::new(a, leader_input_pattern(net)).expect("consistent shapes"))
}

/// Both zero forcing conditions for the `Star` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TdConditions {
    /// The leaders form a loopy zero forcing set of `H`.
    pub loopy_forcing: bool,
    /// The leaders color `H*` black without a change `i → i` at a looped node `i`.
    pub no_forbidden_self_change: bool,
}

impl TdConditions {
    pub fn holds(self) -> bool {
        self.loopy_forcing && self.no_forbidden_self_change
    }
}

pub fn td_conditions(net: &LeaderNetwork) -> TdConditions {
    let leaders = net.leader_set();
    let (loopy_forcing, _) = loopy_zero_forcing(&net.graph, &leaders).expect("leaders validated");
    let looped: BTreeSet<usize> = net.graph.self_loops().map(|v| v - 1).collect();
    let rule = ForcingRule {
        black_forcer_only: false,
        forbidden_self_force: looped,
    };
    let start: Vec<usize> = net.leaders.iter().map(|w| w - 1).collect();
    let (black, _) = run_forcing(
        &net.graph.with_all_loops().forcing_graph(),
        &start,
        &rule,
        &ForcerOrder::Canonical,
    );
    TdConditions {
        loopy_forcing,
        no_forbidden_self_change: black.iter().all(|&b| b),
    }
}

/// Strong structural controllability of the `Star` family via zero forcing.
pub fn td_controllability(net: &LeaderNetwork) -> bool {
    td_conditions(net).holds()
}

/// Strong structural controllability of the `Qdiag` family via ordinary zero forcing.
pub fn mzc_controllability(net: &LeaderNetwork) -> Result<bool> {
    Ok(ordinary_zero_forcing(&net.graph, &net.leader_set())?.0)
}

/// Pattern verdict and graph verdict for one network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkComparison {
    pub family: NetworkFamily,
    pub pattern_verdict: bool,
    pub graph_verdict: bool,
}

impl NetworkComparison {
    pub fn matches(&self) -> bool {
        self.pattern_verdict == self.graph_verdict
    }
}

pub fn compare_network(net: &LeaderNetwork, family: NetworkFamily) -> Result<NetworkComparison> {
    let (sys, graph_verdict) = match family {
        NetworkFamily::Star => (pattern_from_network_star(net), td_controllability(net)),
        NetworkFamily::Qdiag => (pattern_from_network_qdiag(net)?, mzc_controllability(net)?),
    };
    Ok(NetworkComparison {
        family,
        pattern_verdict: is_strongly_controllable(&sys),
        graph_verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepMismatch {
    pub family: NetworkFamily,
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub leaders: Vec<usize>,
    pub pattern_verdict: bool,
    pub graph_verdict: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub max_nodes: usize,
    pub star_cases: u64,
    pub qdiag_cases: u64,
    pub mismatches: Vec<SweepMismatch>,
}

/// Every digraph on `1..=n` nodes for `n ≤ max_nodes` (self-loops optional) with every
/// nonempty leader set: the `Star` family on all of them, the `Qdiag` family on the
/// loop-free ones.
pub fn equivalence_sweep(max_nodes: usize, exec: Execution) -> SweepSummary {
    let mut summary = SweepSummary {
        max_nodes,
        ..SweepSummary::default()
    };
    for n in 1..=max_nodes {
        let pairs: Vec<(usize, usize)> =
            (1..=n).flat_map(|u| (1..=n).map(move |v| (u, v))).collect();
        let per_graph = map_range(exec, 1u64 << pairs.len(), |mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e);
            let graph = Digraph::new(n, edges).expect("ids in range");
            let loopless = !graph.has_self_loops();
            let mut star = 0u64;
            let mut qdiag = 0u64;
            let mut bad = Vec::new();
            for leader_mask in 1u32..(1 << n) {
                let leaders: Vec<usize> = (1..=n)
                    .filter(|v| leader_mask >> (v - 1) & 1 == 1)
                    .collect();
                let net = LeaderNetwork::new(graph.clone(), leaders).expect("valid leaders");
                let mut families = vec![NetworkFamily::Star];
                if loopless {
                    families.push(NetworkFamily::Qdiag);
                }
                for family in families {
                    let c = compare_network(&net, family).expect("family preconditions checked");
                    match family {
                        NetworkFamily::Star => star += 1,
                        NetworkFamily::Qdiag => qdiag += 1,
                    }
                    if !c.matches() {
                        bad.push(SweepMismatch {
                            family,
                            node_count: n,
                            edges: graph.edges().iter().copied().collect(),
                            leaders: net.leaders.clone(),
                            pattern_verdict: c.pattern_verdict,
                            graph_verdict: c.graph_verdict,
                        });
                    }
                }
            }
            (star, qdiag, bad)
        });
        for (star, qdiag, bad) in per_graph {
            summary.star_cases += star;
            summary.qdiag_cases += qdiag;
            summary.mismatches.extend(bad);
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::strong_controllability;
    use crate::pattern::parse_pattern;

    fn net(n: usize, edges: &[(usize, usize)], leaders: &[usize]) -> LeaderNetwork {
        LeaderNetwork::new(
            Digraph::new(n, edges.iter().copied()).unwrap(),
            leaders.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn star_construction() {
        let n = net(3, &[(1, 1), (2, 2), (2, 3), (3, 1), (1, 2)], &[3]);
        let s = pattern_from_network_star(&n);
        assert_eq!(*s.a(), parse_pattern("* 0 *\n* * 0\n0 * 0").unwrap());
        assert_eq!(*s.b(), parse_pattern("0\n0\n*").unwrap());

        let empty = pattern_from_network_star(&net(3, &[], &[1, 2, 3]));
        assert_eq!(
            *empty.a(),
            PatternMatrix::filled(3, 3, PatternSymbol::FixedZero)
        );
        assert_eq!(*empty.b(), parse_pattern("* 0 0\n0 * 0\n0 0 *").unwrap());

        let single = pattern_from_network_star(&net(1, &[(1, 1)], &[1]));
        assert_eq!(*single.a(), parse_pattern("*").unwrap());
        assert_eq!(*single.b(), parse_pattern("*").unwrap());
    }

    #[test]
    fn qdiag_construction() {
        let s = pattern_from_network_qdiag(&net(2, &[(1, 2)], &[1])).unwrap();
        assert_eq!(*s.a(), parse_pattern("? 0\n* ?").unwrap());
        assert_eq!(*s.b(), parse_pattern("*\n0").unwrap());
        assert_eq!(crate::pattern::modified_diagonal(s.a()).unwrap(), *s.a());

        let tri = pattern_from_network_qdiag(&net(3, &[(1, 2), (2, 3), (3, 1)], &[1])).unwrap();
        assert_eq!(tri.a().free_entries(), 6);

        assert_eq!(
            pattern_from_network_qdiag(&net(2, &[(2, 2)], &[1])),
            Err(Error::SelfLoopForbidden(2))
        );
    }

    #[test]
    fn td_examples() {
        let example = net(3, &[(1, 1), (2, 2), (2, 3), (3, 1), (1, 2)], &[3]);
        assert_eq!(
            td_controllability(&example),
            strong_controllability(&pattern_from_network_star(&example)).verdict
        );
        assert!(td_controllability(&net(3, &[(1, 2), (2, 2)], &[1, 2, 3])));
        assert!(!td_controllability(&net(2, &[], &[1])));
    }

    #[test]
    fn mzc_examples() {
        assert!(mzc_controllability(&net(3, &[(1, 2), (2, 3)], &[1])).unwrap());
        assert!(!mzc_controllability(&net(3, &[(1, 2), (1, 3)], &[1])).unwrap());
        assert_eq!(
            mzc_controllability(&net(1, &[(1, 1)], &[1])),
            Err(Error::SelfLoopForbidden(1))
        );
    }

    #[test]
    fn network_file() {
        let f = parse_network("# example\nleaders: 3\n1 1\n2 2\n2 3\n3 1\n").unwrap();
        assert_eq!(f.family, NetworkFamily::Star);
        assert_eq!(f.network.leaders(), &[3]);
        assert_eq!(f.network.node_count(), 3);

        let f = parse_network("nodes: 4\nloops: forbidden\nleaders: 1\n1 2\n").unwrap();
        assert_eq!(f.family, NetworkFamily::Qdiag);
        assert_eq!(f.network.node_count(), 4);

        assert_eq!(
            parse_network("loops: forbidden\nleaders: 1\n1 1\n"),
            Err(Error::SelfLoopForbidden(1))
        );
        assert!(matches!(
            parse_network("1 2\n"),
            Err(Error::InvalidLeaders(_))
        ));
        assert!(matches!(
            parse_network("leaders: 1 1\n1 2\n"),
            Err(Error::InvalidLeaders(_))
        ));
        assert!(matches!(
            parse_network("leaders: 1\nloops: maybe\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_network("leaders: 1\ncolor: red\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn small_sweep_has_no_mismatch() {
        let s = equivalence_sweep(3, Execution::default());
        assert!(s.mismatches.is_empty(), "{:?}", s.mismatches.first());
        // 2·1 + 16·3 + 512·7 star cases, 1·1 + 4·3 + 64·7 loop-free ones
        assert_eq!(s.star_cases, 2 + 48 + 3584);
        assert_eq!(s.qdiag_cases, 1 + 12 + 448);
    }
}
