//! Deterministic DOT rendering: maximal algebras as boxes, degenerate
//! algebras as diamonds, matching the usual figure conventions. Output is
//! byte-stable for a fixed input.

use std::fmt::Write as _;

use kscheck_core::contexts::WPoset;
use kscheck_core::datasets::ContextDiagram;
use kscheck_core::exactnum::Scalar;
use kscheck_core::loops::InclusionGraph;

use crate::common::LabelTable;

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn signature_text(signature: &[usize]) -> String {
    signature
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// The full poset view: every algebra is a node, Hasse edges connect them.
pub fn poset<S: Scalar>(name: &str, poset: &WPoset<S>, labels: &LabelTable<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  node [fontsize=10];");
    for id in 0..poset.len() {
        let algebra = poset.algebra(id);
        let description = labels.figure_label(algebra);
        if algebra.is_maximal() {
            let _ = writeln!(
                out,
                "  a{id} [shape=box label=\"{}\"];",
                escape(&description)
            );
        } else {
            let tag = if algebra.ambient() > 3 {
                format!("{}: {}", signature_text(&algebra.signature()), description)
            } else {
                description
            };
            let _ = writeln!(out, "  a{id} [shape=diamond label=\"{}\"];", escape(&tag));
        }
    }
    for &(child, parent) in poset.hasse_edges() {
        let _ = writeln!(out, "  a{child} -- a{parent};");
    }
    out.push_str("}\n");
    out
}

/// The reduced bipartite graph used by the loop commands.
pub fn reduced<S: Scalar>(
    name: &str,
    poset: &WPoset<S>,
    graph: &InclusionGraph<S>,
    labels: &LabelTable<S>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  node [fontsize=10];");
    for (slot, &id) in graph.maximals().iter().enumerate() {
        let description = labels.figure_label(poset.algebra(id));
        let _ = writeln!(
            out,
            "  m{slot} [shape=box label=\"{}\"];",
            escape(&description)
        );
    }
    for (idx, node) in graph.nodes().iter().enumerate() {
        let description = labels.figure_label(&node.algebra);
        let _ = writeln!(
            out,
            "  d{idx} [shape=diamond label=\"{}\"];",
            escape(&description)
        );
    }
    for (idx, node) in graph.nodes().iter().enumerate() {
        for &slot in &node.parents {
            let _ = writeln!(out, "  d{idx} -- m{slot};");
        }
    }
    out.push_str("}\n");
    out
}

/// Diagram-level datasets: contexts as boxes, rays appearing in at least two
/// contexts as diamonds.
pub fn diagram(diagram: &ContextDiagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(&diagram.name));
    let _ = writeln!(out, "  node [fontsize=10];");
    for (id, ctx) in diagram.contexts.iter().enumerate() {
        let _ = writeln!(
            out,
            "  m{id} [shape=box label=\"{}\"];",
            escape(&ctx.join(" "))
        );
    }
    let mut shared = Vec::new();
    for (ray_id, ray) in diagram.rays.iter().enumerate() {
        let members: Vec<usize> = diagram
            .contexts
            .iter()
            .enumerate()
            .filter(|(_, ctx)| ctx.contains(ray))
            .map(|(id, _)| id)
            .collect();
        if members.len() >= 2 {
            shared.push((ray_id, ray.clone(), members));
        }
    }
    for (ray_id, ray, _) in &shared {
        let _ = writeln!(
            out,
            "  d{ray_id} [shape=diamond label=\"{}\"];",
            escape(ray)
        );
    }
    for (ray_id, _, members) in &shared {
        for ctx in members {
            let _ = writeln!(out, "  d{ray_id} -- m{ctx};");
        }
    }
    out.push_str("}\n");
    out
}
