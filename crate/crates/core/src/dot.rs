//! Graphviz rendering.
//!
//! Each state is a box showing its id and label. A transition on `f` is an
//! `f`-labelled edge (plus any outputs) into a junction point, with one
//! `↓shift` edge per successor. Transitions without successors go to a
//! single `∅` node.

use std::fmt::Write;

use crate::automaton::SetAutomaton;
use crate::goal::Announcement;

fn pattern_name(a: &SetAutomaton, ann: &Announcement) -> String {
    if a.patterns().len() == 1 {
        "ℓ".to_owned()
    } else {
        format!("ℓ{}", ann.pattern.0 + 1)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(a: &SetAutomaton) -> String {
    let sig = a.signature();
    let mut out = String::new();
    out.push_str("digraph set_automaton {\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for id in a.patterns().ids() {
        let name = if a.patterns().len() == 1 {
            "ℓ".to_owned()
        } else {
            format!("ℓ{}", id.0 + 1)
        };
        let _ = writeln!(out, "  // {name} = {}", a.patterns().canonical(id));
    }
    for id in a.state_ids() {
        let marker = if id == a.initial() { ", peripheries=2" } else { "" };
        let _ = writeln!(
            out,
            "  {id} [label=\"{id}\\n{}\"{marker}];",
            a.label(id)
        );
    }
    let mut has_final = false;
    for id in a.state_ids() {
        for f in sig.ids() {
            let t = a.transition(id, f);
            let mut label = escape(sig.name(f));
            for o in &t.outputs {
                let _ = write!(label, "\\n{}@{}", pattern_name(a, o), o.position);
            }
            if t.targets.is_empty() {
                has_final = true;
                let _ = writeln!(out, "  {id} -> final [label=\"{label}\"];");
                continue;
            }
            let junction = format!("{id}_{}", f.0);
            let _ = writeln!(out, "  {junction} [shape=point];");
            let _ = writeln!(out, "  {id} -> {junction} [label=\"{label}\", arrowhead=none];");
            for target in &t.targets {
                let _ = writeln!(
                    out,
                    "  {junction} -> {} [label=\"↓{}\"];",
                    target.state, target.shift
                );
            }
        }
    }
    if has_final {
        out.push_str("  final [label=\"∅\", shape=circle];\n");
    }
    out.push_str("}\n");
    out
}
