use std::fmt::Write;

use super::{ArchGraph, EdgeTag, NodeKind};

impl ArchGraph {
    /// Graphviz rendering with node kinds and edge tags, for debugging.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph qccd {\n");
        for (id, kind) in self.nodes().iter().enumerate() {
            let _ = match kind {
                NodeKind::Major { row, col } => {
                    writeln!(out, "  n{id} [label=\"J{id} ({row},{col})\", kind=major, shape=box];")
                }
                NodeKind::Minor => writeln!(out, "  n{id} [label=\"\", kind=minor, shape=point];"),
                NodeKind::Pass => writeln!(out, "  n{id} [label=\"\", kind=pass, shape=point];"),
            };
        }
        for e in self.edges() {
            let tag = match e.tag {
                EdgeTag::Memory => "memory",
                EdgeTag::Entry => "entry",
                EdgeTag::Processing => "processing",
                EdgeTag::Exit => "exit",
            };
            let _ = writeln!(out, "  n{} -- n{} [label=\"e{}\", tag={tag}];", e.a, e.b, e.id);
        }
        out.push_str("}\n");
        out
    }
}
