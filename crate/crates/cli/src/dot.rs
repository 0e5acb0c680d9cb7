//! Graphviz export of the context poset.

use std::fmt::Write;

use qtopos::site::{ContextSet, Site};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram drawn bottom-up, ♭ as dashed edges (loops omitted),
/// members of `highlight` filled.
pub fn export_dot(site: &Site, highlight: Option<ContextSet>) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=box];\n");
    for v in 0..site.len() {
        let fill = if highlight.is_some_and(|h| h.contains(v)) { ", style=filled, fillcolor=lightblue" } else { "" };
        let _ = writeln!(out, "  {} [label={}{}];", quote(site.label(v)), quote(site.label(v)), fill);
    }
    for (lo, hi) in site.covers() {
        let _ = writeln!(out, "  {} -> {};", quote(site.label(lo)), quote(site.label(hi)));
    }
    for v in 0..site.len() {
        let f = site.flat(v);
        if f != v {
            let _ = writeln!(out, "  {} -> {} [style=dashed];", quote(site.label(v)), quote(site.label(f)));
        }
    }
    out.push_str("}\n");
    out
}
