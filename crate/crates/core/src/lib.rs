//! Strong structural controllability of `0/*/?` pattern systems.
//!
//! A structured system `(A, B)` is strongly structurally controllable when every pair of
//! real matrices matching the patterns is controllable. The decision reduces to two runs
//! of a color change rule on the graphs of `[A B]` and `[Ā B]`; negative answers come
//! with an exactly checkable uncontrollable member.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod graph;
pub mod instance;
pub mod network;
pub mod oracle;
pub mod pattern;
pub mod rational;

pub use analysis::{
    form_three, is_strongly_controllable, strong_controllability, strong_controllability_with,
    strong_stabilizability, term_rank, uncontrollability_witness, weak_controllability,
    witness_from_modified_member, AnalysisOptions, AnalysisReport, Condition, FormThreeResult,
    StabilizabilityReport, UncontrollabilityWitness,
};
pub use error::{Error, ParseError, Result};
pub use exec::Execution;
pub use graph::{
    build_graph, colorability, export_dot, rank_deficiency_witness, ColorChange, ColorTrace,
    Digraph, PatternGraph, RankWitness,
};
pub use instance::{derive_seed, is_member, sample_instance};
pub use network::{
    equivalence_sweep, mzc_controllability, parse_network, pattern_from_network_qdiag,
    pattern_from_network_star, td_controllability, LeaderNetwork, NetworkFamily,
};
pub use oracle::{
    exhaustive_small, hautus_check, kalman_controllable, monte_carlo_ssc, rank_exact, MonteCarlo,
    OracleVerdict, ValueGrid,
};
pub use pattern::{
    modified_diagonal, parse_pattern, render_pattern, weak_relaxation, PatternMatrix,
    PatternSymbol, StructuredSystem,
};
pub use rational::{Rational, RationalMatrix};
