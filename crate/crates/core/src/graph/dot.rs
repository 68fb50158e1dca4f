use std::fmt::Write;

use super::{BipartiteGraph, DmPartition, Matching, Part};

fn colour(p: Option<Part>) -> &'static str {
    match p {
        Some(Part::Over) => "tomato",
        Some(Part::Under) => "lightskyblue",
        Some(Part::Well) => "palegreen",
        None => "white",
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering. Matched edges are bold and oriented equation to
/// variable; nodes are coloured by partition when one is given.
pub fn graph_to_dot(g: &BipartiteGraph, m: Option<&Matching>, dm: Option<&DmPartition>) -> String {
    let mut s = String::from("digraph incidence {\n  rankdir=LR;\n");
    for i in 0..g.n_vars() {
        let p = dm.map(|d| d.var_part[i]);
        let _ = writeln!(
            s,
            "  v{i} [label={}, shape=ellipse, style=filled, fillcolor={}];",
            quote(&g.var(i).to_string()),
            colour(p)
        );
    }
    for j in 0..g.n_eqs() {
        let p = dm.map(|d| d.eq_part[j]);
        let _ = writeln!(
            s,
            "  e{j} [label={}, shape=box, style=filled, fillcolor={}];",
            quote(g.eq_name(j)),
            colour(p)
        );
    }
    for (i, j) in g.edges() {
        if m.is_some_and(|m| m.contains(i, j)) {
            let _ = writeln!(s, "  e{j} -> v{i} [style=bold];");
        } else if m.is_some() {
            let _ = writeln!(s, "  v{i} -> e{j};");
        } else {
            let _ = writeln!(s, "  v{i} -> e{j} [dir=none];");
        }
    }
    s.push_str("}\n");
    s
}
