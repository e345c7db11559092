//! Plain-text renderings of reports.

use std::fmt::Write;

use ugt_core::discovery::{describe_mixture, PipelineResult, Trace};
use ugt_core::efr::EfrResult;
use ugt_core::sce::{PlayerReport, RsceReport, SceReport};
use ugt_core::strategy::describe;
use ugt_core::validate::ValidationReport;
use ugt_core::Game;

fn choices(list: &[(String, String)]) -> String {
    if list.is_empty() {
        return "(no moves)".to_string();
    }
    list.iter().map(|(l, a)| format!("{l}={a}")).collect::<Vec<_>>().join(" ")
}

pub fn validation(r: &ValidationReport) -> String {
    let mut s = String::new();
    if r.ok {
        s.push_str("ok\n");
    }
    for v in &r.violations {
        let _ = writeln!(s, "{} {} [{}]", v.axiom.tag(), v.detail, v.nodes.join(", "));
    }
    s
}

/// One row per strategy, one column per round; `+` survives, `.` eliminated.
pub fn efr(g: &Game, e: &EfrResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "game {}: fixpoint at k={}", g.name, e.fixpoint);
    for i in g.players() {
        let names: Vec<String> = e.strategies[i].iter().map(|x| choices(&describe(g, i, x))).collect();
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(8);
        let _ = writeln!(s, "\nplayer {i}");
        let mut head = format!("  {:<width$}", "strategy");
        for k in 1..=e.rounds.len() {
            let _ = write!(head, " R{k:<2}");
        }
        let _ = writeln!(s, "{}", head.trim_end());
        for (k, name) in names.iter().enumerate() {
            let mut row = format!("  {name:<width$}");
            for r in &e.rounds {
                row.push_str(if r[i].contains(&k) { " +  " } else { " .  " });
            }
            let _ = writeln!(s, "{}", row.trim_end());
        }
    }
    s
}

fn player_lines(s: &mut String, p: &PlayerReport) {
    let mark = |b: bool| if b { "holds" } else { "fails" };
    let _ = writeln!(s, "player {}: {}", p.player, mark(p.holds()));
    let c0 = match (&p.condition0.tree, &p.condition0.pair) {
        (Some(t), _) => format!("visited sets in {t}"),
        (_, Some((a, b))) => format!("{a} and {b} lie in different trees"),
        _ => String::new(),
    };
    let _ = writeln!(s, "  condition 0: {} {c0}", mark(p.condition0.holds));
    for (name, c) in [("condition i", &p.condition_i), ("condition ii", &p.condition_ii)] {
        let at = c.at.as_ref().map(|a| format!(" at {a}")).unwrap_or_default();
        let _ = writeln!(s, "  {name}: {}{at}", mark(c.holds));
    }
}

pub fn sce(g: &Game, r: &SceReport) -> String {
    let mut s = format!("game {}: {}\n", g.name, if r.verdict { "self-confirming" } else { "not self-confirming" });
    for p in &r.players {
        player_lines(&mut s, p);
    }
    s
}

pub fn rsce(g: &Game, r: &RsceReport) -> String {
    let verdict = if r.verdict() { "rationalizable self-confirming" } else { "not a rationalizable self-confirming equilibrium" };
    let mut s = format!("game {}: {verdict}\n", g.name);
    for p in &r.sce.players {
        player_lines(&mut s, p);
    }
    if let Some(i) = r.unsupported {
        let _ = writeln!(s, "player {i}: behavior is not a mixture of rationalizable strategies");
    }
    if let Some(c) = &r.certificate {
        for i in g.players() {
            for (names, w) in describe_mixture(g, i, &c.mixtures[i]) {
                let _ = writeln!(s, "  certificate {i}: {w} x {}", choices(&names));
            }
        }
    }
    s
}

pub fn trace(t: &Trace) -> String {
    let mut s = String::new();
    for (k, (step, g)) in t.steps.iter().zip(&t.games).enumerate() {
        let _ = writeln!(s, "step {k}: {}", if step.changed { "changed" } else { "unchanged" });
        for i in g.players() {
            let _ = writeln!(
                s,
                "  player {i} aware of {}: {}",
                g.trees[step.awareness[i]].name,
                choices(&describe(g, i, &step.profile[i]))
            );
        }
    }
    let _ = writeln!(s, "absorbed after {} step(s)", t.steps.len());
    s
}

pub fn pipeline(r: &PipelineResult) -> String {
    let g = r.trace.last();
    let mut s = trace(&r.trace);
    let _ = writeln!(s, "equilibrium:");
    for i in g.players() {
        let slots = g.space().slots(i);
        for (slot, d) in slots.iter().zip(&r.equilibrium.behaviors[i]) {
            let parts: Vec<String> = slot
                .actions
                .iter()
                .zip(d)
                .filter(|(_, w)| **w != ugt_core::rational::zero())
                .map(|(a, w)| format!("{} {}", g.arena.action_name(*a), ugt_core::rational::fmt_q(w)))
                .collect();
            let _ = writeln!(s, "  player {i} {}: {}", ugt_core::strategy::slot_label(g, slot), parts.join(", "));
        }
    }
    s
}
