use std::fmt::Write;

use super::forcing::ColorTrace;
use super::PatternGraph;

/// Graphviz text for `G(M)`: solid edges for `*`, dashed for `?`, black fill for the
/// final black set of `trace`. Nodes and edges are emitted in ascending order.
pub fn export_dot(graph: &PatternGraph, trace: Option<&ColorTrace>) -> String {
    let black: &[usize] = trace.map_or(&[], |t| &t.final_black);
    let mut out = String::from("digraph G {\n  node [shape=circle];\n");
    for v in 1..=graph.node_count() {
        if black.contains(&v) {
            writeln!(
                out,
                "  {v} [style=filled, fillcolor=black, fontcolor=white];"
            )
            .unwrap();
        } else {
            writeln!(out, "  {v};").unwrap();
        }
    }
    let mut edges: Vec<(usize, usize, &str)> = graph
        .star_edges()
        .iter()
        .map(|&(u, v)| (u, v, "solid"))
        .chain(graph.qmark_edges().iter().map(|&(u, v)| (u, v, "dashed")))
        .collect();
    edges.sort_unstable();
    for (u, v, style) in edges {
        writeln!(out, "  {u} -> {v} [style={style}];").unwrap();
    }
    out.push_str("}\n");
    out
}
