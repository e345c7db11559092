//! Seeded random games with unawareness, for property suites and benchmarks.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::parse;
use crate::model::{Game, NATURE};
use crate::validate::validate;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_players: usize,
    pub nature: bool,
    pub max_depth: usize,
    pub max_branch: usize,
    /// At most this many pure strategies per player.
    pub max_strategies: u128,
    /// Up to this many excluded edges; the lattice holds every union of them.
    pub max_exclusions: usize,
    /// Bound on strategies per player once every information set sits in its own tree,
    /// which caps every game discovery can reach.
    pub max_aware_strategies: u128,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_players: 2, nature: true, max_depth: 3, max_branch: 3, max_strategies: 64, max_exclusions: 2, max_aware_strategies: 1024 }
    }
}

impl GenConfig {
    pub fn single_tree() -> Self {
        GenConfig { max_exclusions: 0, ..GenConfig::default() }
    }
}

struct Node {
    name: String,
    parent: Option<(usize, Vec<String>)>,
    movers: Vec<usize>,
    actions: Vec<Vec<String>>,
    payoffs: Vec<i64>,
}

struct Draft {
    players: usize,
    nature: bool,
    nodes: Vec<Node>,
}

impl Draft {
    /// Nodes that survive excluding `edges`.
    fn present(&self, edges: &BTreeSet<(usize, String)>) -> Vec<bool> {
        let mut out = vec![true; self.nodes.len()];
        for c in 0..self.nodes.len() {
            if let Some((p, tuple)) = &self.nodes[c].parent {
                out[c] = out[*p] && !tuple.iter().any(|a| edges.contains(&(*p, a.clone())));
            }
        }
        out
    }
}

fn grow(rng: &mut ChaCha8Rng, d: &mut Draft, cfg: &GenConfig, parent: Option<(usize, Vec<String>)>, depth: usize) {
    let id = d.nodes.len();
    let terminal = depth == cfg.max_depth || (depth > 0 && rng.gen_bool(0.3));
    let name = format!("n{id}");
    if terminal {
        let payoffs = (0..d.players).map(|_| rng.gen_range(0..10)).collect();
        d.nodes.push(Node { name, parent, movers: vec![], actions: vec![], payoffs });
        return;
    }
    let roll: f64 = rng.gen();
    let movers: Vec<usize> = if d.nature && roll < 0.15 {
        vec![NATURE]
    } else if d.players == 2 && roll < 0.3 {
        vec![1, 2]
    } else {
        vec![rng.gen_range(1..=d.players)]
    };
    let width = if movers.len() > 1 { 2 } else { rng.gen_range(2..=cfg.max_branch) };
    let actions: Vec<Vec<String>> =
        movers.iter().map(|m| (0..width).map(|k| format!("a{id}p{m}x{k}")).collect()).collect();
    d.nodes.push(Node { name, parent, movers, actions: actions.clone(), payoffs: vec![] });
    let mut tuples: Vec<Vec<String>> = vec![vec![]];
    for list in &actions {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                list.iter().map(move |a| {
                    let mut u = t.clone();
                    u.push(a.clone());
                    u
                })
            })
            .collect();
    }
    for t in tuples {
        grow(rng, d, cfg, Some((id, t)), depth + 1);
    }
}

/// A chain or diamond of excluded edges; each lattice element is a subset of them.
fn pick_exclusions(rng: &mut ChaCha8Rng, d: &Draft, max: usize) -> Vec<(usize, String)> {
    let mut cands: Vec<(usize, String)> = Vec::new();
    for (n, node) in d.nodes.iter().enumerate() {
        for (m, list) in node.movers.iter().zip(&node.actions) {
            if *m != NATURE && list.len() >= 2 {
                cands.extend(list.iter().map(|a| (n, a.clone())));
            }
        }
    }
    cands.shuffle(rng);
    let mut chosen: Vec<(usize, String)> = Vec::new();
    let k = if max == 0 { 0 } else { rng.gen_range(1..=max) };
    for c in cands {
        if chosen.len() == k {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c.clone());
        let all: BTreeSet<_> = trial.iter().cloned().collect();
        let full = d.present(&all);
        let keeps_action = d.nodes.iter().enumerate().all(|(n, node)| {
            !full[n] || node.actions.iter().all(|l| l.iter().any(|a| !all.contains(&(n, a.clone()))))
        });
        let single = d.present(&BTreeSet::from([c.clone()]));
        let distinct = chosen.iter().all(|e| {
            let other = d.present(&BTreeSet::from([e.clone()]));
            single[e.0] && other[c.0]
        });
        if keeps_action && full[c.0] && distinct {
            chosen.push(c);
        }
    }
    chosen
}

fn tree_name(mask: usize) -> String {
    if mask == 0 {
        "Tbar".to_string()
    } else {
        format!("T{mask}")
    }
}

fn render(d: &Draft, excl: &[(usize, String)], views: &[usize], rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "game \"generated\"");
    let _ = writeln!(s, "players {}{}", d.players, if d.nature { " nature" } else { "" });
    let _ = writeln!(s, "tree Tbar {{");
    for node in &d.nodes {
        let parent = node.parent.as_ref().map(|(p, t)| format!(" parent {}.{}", d.nodes[*p].name, t.join(","))).unwrap_or_default();
        if node.movers.is_empty() {
            let pay: Vec<String> = node.payoffs.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "  terminal {}{} payoffs {}", node.name, parent, pay.join(","));
        } else {
            let movers: Vec<String> = node.movers.iter().map(|m| m.to_string()).collect();
            let acts: Vec<String> = node.actions.iter().map(|l| l.join(",")).collect();
            let probs = if node.movers == [NATURE] {
                let w: Vec<u32> = node.actions[0].iter().map(|_| rng.gen_range(1..4)).collect();
                let total: u32 = w.iter().sum();
                format!(" probs {}", w.iter().map(|x| format!("{x}/{total}")).collect::<Vec<_>>().join(","))
            } else {
                String::new()
            };
            let _ = writeln!(s, "  node {} player {}{} actions {}{}", node.name, movers.join(","), parent, acts.join(" / "), probs);
        }
    }
    let _ = writeln!(s, "}}");
    let masks = 1usize << excl.len();
    let edges = |mask: usize| -> BTreeSet<(usize, String)> {
        excl.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, e)| e.clone()).collect()
    };
    for mask in 1..masks {
        let list: Vec<String> = edges(mask).iter().map(|(n, a)| format!("{}.{a}", d.nodes[*n].name)).collect();
        let _ = writeln!(s, "subtree {} of Tbar exclude {}", tree_name(mask), list.join(", "));
    }
    for lo in 1..masks {
        for b in 0..excl.len() {
            if lo & (1 << b) != 0 {
                let _ = writeln!(s, "order {} < {}", tree_name(lo), tree_name(lo & !(1 << b)));
            }
        }
    }
    for (i, view) in views.iter().enumerate().skip(1) {
        for mask in 0..masks {
            let low = mask | view;
            if low == mask {
                continue;
            }
            let here = d.present(&edges(mask));
            let there = d.present(&edges(low));
            let gone = edges(low);
            // A node is lowered only below lowered decision nodes of the same player.
            let mut ok = vec![true; d.nodes.len()];
            let mut lowered = vec![false; d.nodes.len()];
            for (n, node) in d.nodes.iter().enumerate() {
                if let Some((p, _)) = &node.parent {
                    ok[n] = ok[*p] && (!d.nodes[*p].movers.contains(&i) || lowered[*p]);
                }
                let active = node.movers.is_empty() || node.movers.contains(&i);
                let same_actions = node
                    .movers
                    .iter()
                    .zip(&node.actions)
                    .filter(|(m, _)| **m == i)
                    .all(|(_, l)| l.iter().all(|a| !gone.contains(&(n, a.clone()))));
                lowered[n] = ok[n] && here[n] && there[n] && active && same_actions;
                if lowered[n] {
                    let _ = writeln!(
                        s,
                        "infoset player {i} at {}.{} = {{ {}.{} }}",
                        tree_name(mask),
                        node.name,
                        tree_name(low),
                        node.name
                    );
                }
            }
        }
    }
    s
}

/// Strategies of `i` when every decision node is its own information set.
pub fn aware_strategy_count(g: &Game, i: usize) -> u128 {
    let mut out: u128 = 1;
    for n in 0..g.num_nodes() {
        if g.movers(n).contains(&i) {
            out = out.saturating_mul(g.actions_at(n, i).len() as u128);
        }
    }
    out
}

fn fits(g: &Game, cfg: &GenConfig) -> bool {
    g.players().all(|i| g.space().count(i) <= cfg.max_strategies && aware_strategy_count(g, i) <= cfg.max_aware_strategies)
        && validate(g).ok
}

/// A valid game from `seed`; awareness views are dropped when they break an axiom.
pub fn random_game(seed: u64, cfg: &GenConfig) -> Game {
    random_game_text(seed, cfg).1
}

pub fn random_game_text(seed: u64, cfg: &GenConfig) -> (String, Game) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let players = rng.gen_range(1..=cfg.max_players);
        let mut d = Draft { players, nature: cfg.nature && rng.gen_bool(0.5), nodes: Vec::new() };
        grow(&mut rng, &mut d, cfg, None, 0);
        let excl = pick_exclusions(&mut rng, &d, cfg.max_exclusions);
        let masks = 1usize << excl.len();
        for attempt in 0..4 {
            let views: Vec<usize> = (0..=players).map(|i| if i == 0 || attempt == 3 { 0 } else { rng.gen_range(0..masks) }).collect();
            let text = render(&d, &excl, &views, &mut rng);
            if let Ok(g) = parse(&text) {
                if fits(&g, cfg) {
                    return (text, g);
                }
            }
        }
    }
}

/// Longest chain of strict tree inclusions.
pub fn lattice_height(g: &Game) -> usize {
    (0..g.trees.len()).map(|t| g.height_above(t)).max().unwrap_or(0)
}
