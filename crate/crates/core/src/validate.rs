//! Structural axioms of games with unawareness.

use serde::Serialize;

use crate::model::{Game, NodeIdx, Player, TreeIdx, NATURE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    P1,
    P2,
    P3,
    U0,
    U1,
    U4,
    U5,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    #[serde(rename = "COPIES")]
    Copies,
    #[serde(rename = "ARBOR")]
    Arbor,
}

impl Axiom {
    pub fn tag(self) -> &'static str {
        match self {
            Axiom::P1 => "P1",
            Axiom::P2 => "P2",
            Axiom::P3 => "P3",
            Axiom::U0 => "U0",
            Axiom::U1 => "U1",
            Axiom::U4 => "U4",
            Axiom::U5 => "U5",
            Axiom::I2 => "I2",
            Axiom::I3 => "I3",
            Axiom::I4 => "I4",
            Axiom::I5 => "I5",
            Axiom::I6 => "I6",
            Axiom::I7 => "I7",
            Axiom::Copies => "COPIES",
            Axiom::Arbor => "ARBOR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub nodes: Vec<String>,
    pub trees: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub schema: &'static str,
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

struct Collector<'g> {
    game: &'g Game,
    raw: Vec<(Axiom, Vec<NodeIdx>, Vec<TreeIdx>, String)>,
}

impl<'g> Collector<'g> {
    fn push(&mut self, axiom: Axiom, nodes: Vec<NodeIdx>, trees: Vec<TreeIdx>, detail: String) {
        self.raw.push((axiom, nodes, trees, detail));
    }

    fn finish(mut self) -> ValidationReport {
        self.raw.sort();
        self.raw.dedup();
        let g = self.game;
        let violations: Vec<Violation> = self
            .raw
            .into_iter()
            .map(|(axiom, nodes, trees, detail)| Violation {
                axiom,
                nodes: nodes.iter().map(|n| g.node_label(*n)).collect(),
                trees: trees.iter().map(|t| g.trees[*t].name.clone()).collect(),
                detail,
            })
            .collect();
        ValidationReport { schema: "ugt.validation/1", ok: violations.is_empty(), violations }
    }
}

/// Checks every axiom and reports all violations.
pub fn validate(game: &Game) -> ValidationReport {
    let mut c = Collector { game, raw: Vec::new() };
    arbor(&mut c);
    properties(&mut c);
    copies(&mut c);
    awareness(&mut c);
    information(&mut c);
    recall(&mut c);
    subtrees(&mut c);
    c.finish()
}

fn arbor(c: &mut Collector) {
    let g = c.game;
    let arena = &g.arena;
    for (idx, n) in arena.nodes.iter().enumerate() {
        if let Some((p, _)) = &n.parent {
            if *p >= idx {
                c.raw.push((Axiom::Arbor, vec![], vec![], format!("node {} precedes its parent", n.name)));
            }
        }
        if n.is_terminal() {
            if n.payoffs.len() != g.num_players {
                c.raw.push((Axiom::Arbor, vec![], vec![], format!("payoff arity at {}", n.name)));
            }
            continue;
        }
        let expected: usize = n.actions.iter().map(|a| a.len()).product();
        let mut profiles: Vec<&Vec<usize>> = n.children.iter().map(|(p, _)| p).collect();
        profiles.sort();
        profiles.dedup();
        let complete = profiles.len() == n.children.len()
            && n.children.len() == expected
            && n.children.iter().all(|(p, _)| {
                p.len() == n.actions.len() && p.iter().zip(&n.actions).all(|(a, s)| s.contains(a))
            });
        if !complete || n.actions.iter().any(|a| a.is_empty()) {
            c.raw.push((
                Axiom::Arbor,
                vec![],
                vec![],
                format!("successor map at {} is not a bijection from action profiles", n.name),
            ));
        }
        if n.movers.windows(2).any(|w| w[0] >= w[1]) || n.movers.iter().any(|m| *m > g.num_players) {
            c.raw.push((Axiom::Arbor, vec![], vec![], format!("movers at {}", n.name)));
        }
        if n.movers.contains(&NATURE) && !g.nature {
            c.raw.push((Axiom::Arbor, vec![], vec![], format!("nature moves at {} without nature", n.name)));
        }
    }
    if arena.nodes.iter().filter(|n| n.parent.is_none()).count() != 1 {
        c.raw.push((Axiom::Arbor, vec![], vec![], "arena must have exactly one root".into()));
    }
    if g.trees.first().map(|t| t.members.iter().all(|m| *m)) != Some(true) {
        c.raw.push((Axiom::Arbor, vec![], vec![0], "no tree equals the full arena".into()));
    }
    let nt = g.trees.len();
    for t in 0..nt {
        if g.tree_nodes(t).iter().filter(|n| g.parent(**n).is_none()).count() != 1 {
            c.raw.push((Axiom::Arbor, vec![], vec![t], "tree is not rooted and connected".into()));
        }
        for u in t + 1..nt {
            if g.trees[t].members == g.trees[u].members {
                c.raw.push((Axiom::Arbor, vec![], vec![t, u], "duplicate trees".into()));
            }
            if g.join(t, u).is_none() {
                c.raw.push((Axiom::Arbor, vec![], vec![t, u], "trees have no join in the family".into()));
            }
        }
    }
}

fn properties(c: &mut Collector) {
    let g = c.game;
    for n in 0..g.num_nodes() {
        let an = g.arena_node(n);
        let kids = g.children(n);
        if kids.is_empty() {
            if !an.is_terminal() {
                c.push(Axiom::P1, vec![n], vec![g.tree_of(n)], "leaf of a subtree is not terminal in the arena".into());
            }
            continue;
        }
        let local: Vec<&[usize]> = an.movers.iter().map(|m| g.actions_at(n, *m)).collect();
        let expected: usize = local.iter().map(|a| a.len()).product();
        let full = kids.len() == expected
            && kids.iter().all(|(p, _)| p.iter().zip(&local).all(|(a, s)| s.contains(a)));
        if !full {
            c.push(
                Axiom::P2,
                vec![n],
                vec![g.tree_of(n)],
                "successors in the tree are not a product of local action sets".into(),
            );
        }
    }
    for t in 0..g.trees.len() {
        let nodes = g.tree_nodes(t);
        for p in g.players() {
            let dec: Vec<NodeIdx> = nodes
                .iter()
                .copied()
                .filter(|n| !g.is_terminal(*n) && g.movers(*n).contains(&p))
                .collect();
            for (k, a) in dec.iter().enumerate() {
                for b in &dec[k + 1..] {
                    let (x, y) = (g.actions_at(*a, p), g.actions_at(*b, p));
                    let overlap = x.iter().any(|q| y.contains(q));
                    if overlap && !same_set(x, y) {
                        c.push(Axiom::P3, vec![*a, *b], vec![t], format!("player {p} action sets overlap but differ"));
                    }
                }
            }
        }
    }
}

fn copies(c: &mut Collector) {
    let g = c.game;
    for n in 0..g.num_nodes() {
        let t = g.tree_of(n);
        for u in 0..g.trees.len() {
            if !g.leq(t, u) {
                continue;
            }
            // Every node of a lower tree has its copy, with matching edges, above.
            match g.copy_in(n, u) {
                None => c.push(Axiom::Copies, vec![n], vec![u], "copy missing in a higher tree".into()),
                Some(m) => {
                    for (profile, kid) in g.children(n) {
                        let ok = g
                            .children(m)
                            .iter()
                            .any(|(pr, k2)| pr == profile && g.node(*k2).arena == g.node(*kid).arena);
                        if !ok {
                            c.push(Axiom::Copies, vec![n, m], vec![t, u], "edge does not lead to the copy".into());
                        }
                    }
                }
            }
        }
    }
}

fn awareness(c: &mut Collector) {
    let g = c.game;
    for n in 0..g.num_nodes() {
        let tn = g.tree_of(n);
        for &(p, h) in g.active(n) {
            let hs = g.infoset(h);
            let trees: Vec<TreeIdx> = {
                let mut v: Vec<TreeIdx> = hs.members.iter().map(|m| g.tree_of(*m)).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            if trees.len() != 1 {
                c.push(Axiom::U0, vec![n], trees, format!("information set of player {p} straddles trees"));
                continue;
            }
            let th = trees[0];
            if !g.leq(th, tn) {
                c.push(Axiom::U0, vec![n], vec![th, tn], format!("player {p} is aware of a tree above the node"));
                continue;
            }
            if let Some(copy) = g.copy_in(n, th) {
                if !hs.members.contains(&copy) {
                    c.push(Axiom::U1, vec![n, copy], vec![th], format!("copy of the node missing from player {p}'s set"));
                }
            }
        }
    }
}

fn information(c: &mut Collector) {
    let g = c.game;
    for n in 0..g.num_nodes() {
        for &(p, h) in g.active(n) {
            let hs = g.infoset(h);
            for &m in &hs.members {
                if g.infoset_of(m, p) != Some(h) {
                    c.push(Axiom::I2, vec![n, m], vec![], format!("player {p}'s set differs at a member"));
                }
            }
            if !g.is_terminal(n) {
                let mine = g.actions_at(n, p);
                for &m in &hs.members {
                    let theirs = g.actions_at(m, p);
                    if g.is_terminal(m) || !theirs.iter().all(|a| mine.contains(a)) {
                        c.push(Axiom::I4, vec![n, m], vec![], format!("player {p} imagines actions"));
                    }
                }
                i3(c, n, p, h);
            } else {
                let th = hs.tree;
                for &m in &hs.members {
                    if !g.is_terminal(m) || g.tree_of(m) != th {
                        c.push(Axiom::I7, vec![n, m], vec![th], format!("player {p}'s terminal set has a decision node"));
                    } else if g.payoff(m, p) != g.payoff(n, p) {
                        c.push(Axiom::I7, vec![n, m], vec![], format!("player {p}'s payoff differs within a terminal set"));
                    }
                }
            }
        }
    }
    for t in 0..g.trees.len() {
        for p in g.players() {
            let dec: Vec<NodeIdx> = g
                .tree_nodes(t)
                .iter()
                .copied()
                .filter(|n| !g.is_terminal(*n) && g.movers(*n).contains(&p))
                .collect();
            for (k, a) in dec.iter().enumerate() {
                for b in &dec[k + 1..] {
                    if same_set(g.actions_at(*a, p), g.actions_at(*b, p))
                        && g.infoset_of(*a, p) != g.infoset_of(*b, p)
                    {
                        c.push(Axiom::I5, vec![*a, *b], vec![t], format!("player {p} has equal actions in distinct sets"));
                    }
                }
            }
        }
    }
}

fn i3(c: &mut Collector, n: NodeIdx, p: Player, h: usize) {
    let g = c.game;
    let hs = g.infoset(h);
    let th = hs.tree;
    for &m in &hs.members {
        if g.tree_of(m) != th || g.is_terminal(m) {
            continue;
        }
        for &d in g.tree_nodes(th) {
            if g.is_terminal(d) || !g.movers(d).contains(&p) || !g.is_ancestor(m, d) {
                continue;
            }
            if let Some(hd) = g.infoset_of(d, p) {
                if g.infoset(hd).members.iter().any(|x| g.tree_of(*x) != th) {
                    c.push(Axiom::I3, vec![n, d], vec![th], format!("player {p} leaves the tree of a conceived path"));
                }
            }
        }
    }
}

fn recall(c: &mut Collector) {
    let g = c.game;
    for nk in 0..g.num_nodes() {
        for &(p, hk) in g.active(nk) {
            let others: Vec<NodeIdx> = g.infoset(hk).members.iter().copied().filter(|m| *m != nk).collect();
            if others.is_empty() {
                continue;
            }
            for n1 in g.ancestors(nk) {
                if !g.movers(n1).contains(&p) {
                    continue;
                }
                let a = g.action_toward(n1, nk, p).unwrap();
                let h1 = g.infoset_of(n1, p);
                for &np in &others {
                    let found = g.ancestors(np).into_iter().any(|x| {
                        g.infoset_of(x, p) == h1 && g.action_toward(x, np, p) == Some(a)
                    });
                    if !found {
                        c.push(
                            Axiom::I6,
                            vec![nk, n1, np],
                            vec![],
                            format!("player {p} forgets action {}", g.arena.action_name(a)),
                        );
                    }
                }
            }
        }
    }
}

fn subtrees(c: &mut Collector) {
    let g = c.game;
    let nt = g.trees.len();
    for n in 0..g.num_nodes() {
        let t2 = g.tree_of(n);
        for &(p, h) in g.active(n) {
            let hs = g.infoset(h);
            if hs.members.iter().any(|m| g.tree_of(*m) != hs.tree) {
                continue;
            }
            let th = hs.tree;
            for t1 in 0..nt {
                if !g.leq(t1, t2) {
                    continue;
                }
                let Some(copy) = g.copy_in(n, t1) else { continue };
                // U4: ignorance carries down to intermediate trees above the set's tree.
                if g.leq(th, t1) && g.infoset_of(copy, p) != Some(h) {
                    c.push(Axiom::U4, vec![n, copy], vec![th, t1], format!("player {p}'s ignorance is lost"));
                }
                // U5: knowledge carries down to trees below the set's tree.
                if g.leq(t1, th) && g.leq(th, t2) {
                    let mut expected: Vec<NodeIdx> =
                        hs.members.iter().filter_map(|m| g.copy_in(*m, t1)).collect();
                    expected.sort_unstable();
                    let got = g.infoset_of(copy, p).map(|x| g.infoset(x).members.clone());
                    if got.as_deref() != Some(&expected[..]) {
                        c.push(Axiom::U5, vec![n, copy], vec![th, t1], format!("player {p}'s knowledge is lost"));
                    }
                }
            }
        }
    }
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}
