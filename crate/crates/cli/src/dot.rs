//! Graphviz export: one `digraph` per template. Committed locations are
//! drawn as double octagons and the initial location gets an entry arrow.
//! Edge labels list select, guard, sync and update on separate lines.

use std::fmt::Write as _;

use handshake_core::automata::{Edge, Sync, UpdateStep};
use handshake_core::{ProcessTemplate, SystemDef};

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn edge_label(e: &Edge) -> String {
    let mut lines = Vec::new();
    if let Some(sel) = &e.select {
        lines.push(format!("select {} : [{}, {}]", sel.name, sel.range.lo, sel.range.hi));
    }
    if !e.guard.is_true_literal() {
        lines.push(e.guard.to_string());
    }
    match &e.sync {
        Sync::None => {}
        Sync::Send(c) => lines.push(format!("{c}!")),
        Sync::Receive(c) => lines.push(format!("{c}?")),
    }
    let updates: Vec<String> = e
        .update
        .iter()
        .map(|u| match u {
            UpdateStep::Assign(r, v) => format!("{r} := {v}"),
            UpdateStep::ResetClock(c) => format!("{c} := 0"),
        })
        .collect();
    if !updates.is_empty() {
        lines.push(updates.join(", "));
    }
    if let Some(tag) = &e.tag {
        lines.push(format!("[{tag}]"));
    }
    lines.join("\n")
}

pub fn template_dot(t: &ProcessTemplate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(t.name.as_str()));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle];");
    let _ = writeln!(out, "  __start [shape=point, label=\"\"];");
    for l in &t.locations {
        let mut label = l.name.to_string();
        if !l.invariant.is_true_literal() {
            label.push_str(&format!("\n{}", l.invariant));
        }
        let mut attrs = vec![format!("label={}", quote(&label))];
        if l.is_committed() {
            attrs.push("shape=doubleoctagon".into());
            attrs.push("xlabel=\"C\"".into());
        }
        let _ = writeln!(out, "  {} [{}];", quote(l.name.as_str()), attrs.join(", "));
    }
    if let Some(i) = t.initial_location() {
        let _ = writeln!(out, "  __start -> {};", quote(t.locations[i].name.as_str()));
    }
    for e in &t.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(e.source.as_str()),
            quote(e.target.as_str()),
            quote(&edge_label(e))
        );
    }
    out.push_str("}\n");
    out
}

/// Every template of `def`, in declaration order.
pub fn system_dot(def: &SystemDef) -> String {
    def.templates.iter().map(template_dot).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use handshake_core::automata::Location;
    use handshake_core::Expr;

    #[test]
    fn labels_list_guard_sync_and_update_in_order() {
        let e = Edge::new("A", "B").select("j", 0, 1).guard(Expr::param("j").eq(Expr::Int(0))).send("syn");
        let label = edge_label(&e);
        let lines: Vec<&str> = label.lines().collect();
        assert_eq!(lines[0], "select j : [0, 1]");
        assert_eq!(lines[2], "syn!");
    }

    #[test]
    fn quoting_escapes_dot_metacharacters() {
        assert_eq!(quote("a\"b\\c\nd"), "\"a\\\"b\\\\c\\nd\"");
        let mut t = ProcessTemplate::new("T");
        t.locations = vec![Location::committed("C0").initial()];
        let dot = template_dot(&t);
        assert!(dot.contains("\"C0\" [label=\"C0\", shape=doubleoctagon, xlabel=\"C\"]"));
        assert!(dot.contains("__start -> \"C0\""));
    }
}
