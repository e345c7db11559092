//! Graphviz rendering: one cluster per tree, dashed groups per information set.

use std::fmt::Write as _;

use crate::model::Game;

fn id(g: &Game, n: usize) -> String {
    format!("\"{}\"", g.node_label(n))
}

pub fn export_dot(g: &Game) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", g.name);
    let _ = writeln!(out, "  compound=true;");
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for t in 0..g.trees.len() {
        let _ = writeln!(out, "  subgraph \"cluster_{}\" {{", g.trees[t].name);
        let _ = writeln!(out, "    label=\"{}\";", g.trees[t].name);
        for &n in g.tree_nodes(t) {
            let an = g.arena_node(n);
            let label = if an.is_terminal() {
                an.payoffs.iter().map(crate::rational::fmt_q).collect::<Vec<_>>().join(",")
            } else {
                an.movers.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
            };
            let shape = if an.is_terminal() { ", shape=box" } else { "" };
            let _ = writeln!(out, "    {} [label=\"{}\"{}];", id(g, n), label, shape);
        }
        for &n in g.tree_nodes(t) {
            for (profile, c) in g.children(n) {
                let names: Vec<&str> = profile.iter().map(|a| g.arena.action_name(*a)).collect();
                let _ = writeln!(out, "    {} -> {} [label=\"{}\"];", id(g, n), id(g, *c), names.join(","));
            }
        }
        for (h, hs) in g.infosets().iter().enumerate() {
            if hs.tree != t || hs.members.len() < 2 {
                continue;
            }
            let _ = writeln!(out, "    subgraph \"cluster_h{h}\" {{");
            let _ = writeln!(out, "      style=dashed; label=\"{}\";", hs.player);
            for m in &hs.members {
                let _ = writeln!(out, "      {};", id(g, *m));
            }
            let _ = writeln!(out, "    }}");
        }
        let _ = writeln!(out, "  }}");
    }
    for n in 0..g.num_nodes() {
        for &(p, h) in g.active(n) {
            let hs = g.infoset(h);
            if hs.tree != g.tree_of(n) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dotted, color=blue, constraint=false, label=\"{}\"];",
                    id(g, n),
                    id(g, hs.members[0]),
                    p
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Number of cross-tree information-set arrows in the rendering.
pub fn cross_tree_arrows(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains("style=dotted")).count()
}
