//! Graphviz export. Atoms get one fill color each; vertices inside a
//! nonempty proper core get a double border; sources are drawn as boxes.

use std::fmt::Write as _;

use crate::graph::VertexSet;
use crate::space::Space;

const PALETTE: usize = 12;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(space: &Space, cores: &[VertexSet]) -> String {
    let g = space.graph();
    let in_core = cores
        .iter()
        .filter(|c| !c.is_empty() && **c != space.omega0())
        .fold(VertexSet::EMPTY, |acc, c| acc | *c);
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(g.name()));
    out.push_str("  node [style=filled, colorscheme=set312];\n");
    for c in cores {
        let _ = writeln!(out, "  // core {{{}}}", g.format_set(*c).join(","));
    }
    for v in 0..g.vertex_count() {
        let mut attrs = Vec::new();
        match space.atom_index_of(v) {
            Some(i) => attrs.push(format!("fillcolor={}", i % PALETTE + 1)),
            None => {
                attrs.push("fillcolor=white".to_string());
                attrs.push("shape=box".to_string());
            }
        }
        if in_core.contains(v) {
            attrs.push("peripheries=2".to_string());
        }
        let _ = writeln!(out, "  {} [{}];", quote(g.vertex_name(v)), attrs.join(", "));
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(g.vertex_name(e.src)),
            quote(g.vertex_name(e.dst)),
            quote(g.letter_name(e.label))
        );
    }
    out.push_str("}\n");
    out
}
