//! Arena trees, the subtree lattice with node copies, and information sets.
//!
//! Nodes of the arena are stored in preorder. A node of the disjoint union
//! over all trees is a pair (tree, arena node); the copy of a node in a lower
//! tree is the pair with the same arena node, so copies always commute.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rational::Q;

pub type Player = usize;
pub const NATURE: Player = 0;
pub type ArenaIdx = usize;
pub type TreeIdx = usize;
pub type NodeIdx = usize;
pub type InfosetIdx = usize;
pub type ActionId = usize;

/// The top tree always sits at index 0 after canonical ordering.
pub const TOP: TreeIdx = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaNode {
    pub name: String,
    /// Parent and the action profile (one action per parent mover) leading here.
    pub parent: Option<(ArenaIdx, Vec<ActionId>)>,
    /// Active movers, sorted; nature is player 0. Empty at terminal nodes.
    pub movers: Vec<Player>,
    /// Action sets, aligned with `movers`.
    pub actions: Vec<Vec<ActionId>>,
    /// Successor map: action profile -> child, in lexicographic action order.
    pub children: Vec<(Vec<ActionId>, ArenaIdx)>,
    /// Payoffs of players 1..=k at terminal nodes.
    pub payoffs: Vec<Q>,
    /// Optional fixed distribution for a nature node, aligned with nature's actions.
    pub chance: Option<Vec<Q>>,
}

impl ArenaNode {
    pub fn is_terminal(&self) -> bool {
        self.movers.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    pub nodes: Vec<ArenaNode>,
    pub action_names: Vec<String>,
}

impl Arena {
    pub fn node_by_name(&self, name: &str) -> Option<ArenaIdx> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_names.iter().position(|a| a == name)
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a]
    }

    /// Arena nodes whose path from the root avoids every excluded (node, action) edge.
    pub fn members_excluding(&self, base: &[bool], exclude: &[(ArenaIdx, ActionId)]) -> Vec<bool> {
        let mut keep = vec![false; self.nodes.len()];
        for (idx, node) in self.nodes.iter().enumerate() {
            if !base[idx] {
                continue;
            }
            keep[idx] = match &node.parent {
                None => true,
                Some((p, profile)) => {
                    keep[*p] && !exclude.iter().any(|(en, ea)| en == p && profile.contains(ea))
                }
            };
        }
        keep
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeDef {
    Full,
    /// Derived from the tree named `base` by deleting the subtrees behind the listed edges.
    Subtree { base: String, exclude: Vec<(ArenaIdx, ActionId)> },
}

#[derive(Clone, Debug)]
pub struct Tree {
    pub name: String,
    pub def: TreeDef,
    /// Arena membership.
    pub members: Vec<bool>,
}

impl Tree {
    pub fn size(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub tree: TreeIdx,
    pub arena: ArenaIdx,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infoset {
    pub player: Player,
    /// Sorted member nodes. Well-formed games keep them inside one tree.
    pub members: Vec<NodeIdx>,
    /// Tree of the first member.
    pub tree: TreeIdx,
    /// Actions available at the first member (empty for terminal information sets).
    pub actions: Vec<ActionId>,
    pub terminal: bool,
}

/// Information-set declaration addressed by tree name and arena node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfosetDecl {
    pub player: Player,
    pub at: (String, ArenaIdx),
    pub members: Vec<(String, ArenaIdx)>,
}

/// An extensive-form game with unawareness.
#[derive(Clone, Debug)]
pub struct Game {
    pub name: String,
    pub num_players: usize,
    pub nature: bool,
    pub arena: Arena,
    pub trees: Vec<Tree>,
    nodes: Vec<NodeRef>,
    index: HashMap<(TreeIdx, ArenaIdx), NodeIdx>,
    children: Vec<Vec<(Vec<ActionId>, NodeIdx)>>,
    parent: Vec<Option<(NodeIdx, Vec<ActionId>)>>,
    depth: Vec<usize>,
    tree_actions: Vec<Vec<Vec<ActionId>>>,
    tree_nodes: Vec<Vec<NodeIdx>>,
    leq: Vec<Vec<bool>>,
    infosets: Vec<Infoset>,
    /// Per node: (player, information set) for every active non-nature player.
    assign: Vec<Vec<(Player, InfosetIdx)>>,
    pub(crate) space: OnceLock<crate::strategy::Space>,
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.num_players == other.num_players
            && self.nature == other.nature
            && self.arena == other.arena
            && self.trees.len() == other.trees.len()
            && self
                .trees
                .iter()
                .zip(&other.trees)
                .all(|(a, b)| a.name == b.name && a.members == b.members)
            && self.infosets == other.infosets
            && self.assign == other.assign
    }
}

impl Eq for Game {}

impl Game {
    /// Materializes node tables and information sets. Undeclared (node, player)
    /// pairs get the singleton information set containing the node itself.
    pub fn build(
        name: String,
        num_players: usize,
        nature: bool,
        arena: Arena,
        mut trees: Vec<Tree>,
        decls: &[InfosetDecl],
    ) -> Result<Game> {
        if arena.nodes.is_empty() {
            return Err(Error::Structure("arena has no nodes".into()));
        }
        trees.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.name.cmp(&b.name)));
        let mut decl_map: BTreeMap<(Player, NodeRef), BTreeSet<NodeRef>> = BTreeMap::new();
        let tree_idx = |trees: &[Tree], n: &str| -> Result<TreeIdx> {
            trees
                .iter()
                .position(|t| t.name == n)
                .ok_or_else(|| Error::Structure(format!("unknown tree {n}")))
        };
        for d in decls {
            let at = NodeRef { tree: tree_idx(&trees, &d.at.0)?, arena: d.at.1 };
            let mut set = BTreeSet::new();
            for (t, a) in &d.members {
                set.insert(NodeRef { tree: tree_idx(&trees, t)?, arena: *a });
            }
            decl_map.insert((d.player, at), set);
        }
        Self::from_assignment(name, num_players, nature, arena, trees, |p, n| {
            decl_map.get(&(p, n)).cloned()
        })
    }

    fn from_assignment(
        name: String,
        num_players: usize,
        nature: bool,
        arena: Arena,
        trees: Vec<Tree>,
        lookup: impl Fn(Player, NodeRef) -> Option<BTreeSet<NodeRef>>,
    ) -> Result<Game> {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut tree_nodes = vec![Vec::new(); trees.len()];
        for (t, tree) in trees.iter().enumerate() {
            for a in 0..arena.nodes.len() {
                if tree.members[a] {
                    index.insert((t, a), nodes.len());
                    tree_nodes[t].push(nodes.len());
                    nodes.push(NodeRef { tree: t, arena: a });
                }
            }
        }
        let mut children = vec![Vec::new(); nodes.len()];
        let mut parent = vec![None; nodes.len()];
        let mut depth = vec![0; nodes.len()];
        let mut tree_actions = Vec::with_capacity(nodes.len());
        for (idx, nr) in nodes.iter().enumerate() {
            let an = &arena.nodes[nr.arena];
            for (profile, c) in &an.children {
                if let Some(&ci) = index.get(&(nr.tree, *c)) {
                    children[idx].push((profile.clone(), ci));
                }
            }
            if let Some((p, profile)) = &an.parent {
                if let Some(&pi) = index.get(&(nr.tree, *p)) {
                    parent[idx] = Some((pi, profile.clone()));
                    depth[idx] = depth[pi] + 1;
                }
            }
            let acts: Vec<Vec<ActionId>> = an
                .actions
                .iter()
                .enumerate()
                .map(|(k, list)| {
                    list.iter()
                        .copied()
                        .filter(|a| children[idx].iter().any(|(pr, _)| pr[k] == *a))
                        .collect()
                })
                .collect();
            tree_actions.push(acts);
        }
        let leq = (0..trees.len())
            .map(|a| {
                (0..trees.len())
                    .map(|b| trees[a].members.iter().zip(&trees[b].members).all(|(x, y)| !*x || *y))
                    .collect()
            })
            .collect();

        // Gather member sets per (player, node), dedupe into information sets.
        let mut raw: Vec<Vec<(Player, Vec<NodeIdx>)>> = Vec::with_capacity(nodes.len());
        for (idx, nr) in nodes.iter().enumerate() {
            let an = &arena.nodes[nr.arena];
            let players: Vec<Player> = if an.is_terminal() {
                (1..=num_players).collect()
            } else {
                an.movers.iter().copied().filter(|p| *p != NATURE).collect()
            };
            let mut per = Vec::new();
            for p in players {
                let members = match lookup(p, *nr) {
                    Some(set) => {
                        let mut v = Vec::new();
                        for m in set {
                            let mi = index.get(&(m.tree, m.arena)).copied().ok_or_else(|| {
                                Error::Structure(format!(
                                    "information set member {}.{} is not a node of that tree",
                                    trees[m.tree].name, arena.nodes[m.arena].name
                                ))
                            })?;
                            v.push(mi);
                        }
                        v.sort_unstable();
                        v
                    }
                    None => vec![idx],
                };
                if members.is_empty() {
                    return Err(Error::Structure("empty information set".into()));
                }
                per.push((p, members));
            }
            raw.push(per);
        }
        let mut keys: BTreeSet<(Player, Vec<NodeIdx>)> = BTreeSet::new();
        for per in &raw {
            for (p, m) in per {
                keys.insert((*p, m.clone()));
            }
        }
        let mut infosets: Vec<Infoset> = keys
            .into_iter()
            .map(|(player, members)| {
                let first = members[0];
                let an = &arena.nodes[nodes[first].arena];
                let actions = an
                    .movers
                    .iter()
                    .position(|m| *m == player)
                    .map(|k| tree_actions[first][k].clone())
                    .unwrap_or_default();
                Infoset {
                    player,
                    tree: nodes[first].tree,
                    terminal: an.is_terminal(),
                    actions,
                    members,
                }
            })
            .collect();
        infosets.sort_by(|a, b| (a.player, a.tree, &a.members).cmp(&(b.player, b.tree, &b.members)));
        let lookup_id: HashMap<(Player, Vec<NodeIdx>), InfosetIdx> = infosets
            .iter()
            .enumerate()
            .map(|(i, h)| ((h.player, h.members.clone()), i))
            .collect();
        let assign = raw
            .into_iter()
            .map(|per| per.into_iter().map(|(p, m)| (p, lookup_id[&(p, m)])).collect())
            .collect();
        Ok(Game {
            name,
            num_players,
            nature,
            arena,
            trees,
            nodes,
            index,
            children,
            parent,
            depth,
            tree_actions,
            tree_nodes,
            leq,
            infosets,
            assign,
            space: OnceLock::new(),
        })
    }

    /// Same arena, trees and payoffs with information sets replaced.
    pub fn with_infosets(&self, sets: &BTreeMap<(Player, NodeIdx), Vec<NodeIdx>>) -> Result<Game> {
        let nodes = self.nodes.clone();
        let lookup = |p: Player, nr: NodeRef| -> Option<BTreeSet<NodeRef>> {
            let idx = self.index[&(nr.tree, nr.arena)];
            sets.get(&(p, idx)).map(|m| m.iter().map(|x| nodes[*x]).collect())
        };
        Self::from_assignment(
            self.name.clone(),
            self.num_players,
            self.nature,
            self.arena.clone(),
            self.trees.clone(),
            lookup,
        )
    }

    /// Current assignment (player, node) -> member list.
    pub fn assignment(&self) -> BTreeMap<(Player, NodeIdx), Vec<NodeIdx>> {
        let mut out = BTreeMap::new();
        for (n, per) in self.assign.iter().enumerate() {
            for (p, h) in per {
                out.insert((*p, n), self.infosets[*h].members.clone());
            }
        }
        out
    }

    // ---- node tables ----

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, n: NodeIdx) -> NodeRef {
        self.nodes[n]
    }

    pub fn node_at(&self, tree: TreeIdx, arena: ArenaIdx) -> Option<NodeIdx> {
        self.index.get(&(tree, arena)).copied()
    }

    pub fn tree_of(&self, n: NodeIdx) -> TreeIdx {
        self.nodes[n].tree
    }

    pub fn arena_node(&self, n: NodeIdx) -> &ArenaNode {
        &self.arena.nodes[self.nodes[n].arena]
    }

    pub fn is_terminal(&self, n: NodeIdx) -> bool {
        self.arena_node(n).is_terminal()
    }

    pub fn children(&self, n: NodeIdx) -> &[(Vec<ActionId>, NodeIdx)] {
        &self.children[n]
    }

    pub fn parent(&self, n: NodeIdx) -> Option<&(NodeIdx, Vec<ActionId>)> {
        self.parent[n].as_ref()
    }

    pub fn depth(&self, n: NodeIdx) -> usize {
        self.depth[n]
    }

    /// Movers at the node (nature included), in arena order.
    pub fn movers(&self, n: NodeIdx) -> &[Player] {
        &self.arena_node(n).movers
    }

    /// Tree-local action set of `mover` at `n` (A_n^{i,T}).
    pub fn actions_at(&self, n: NodeIdx, mover: Player) -> &[ActionId] {
        match self.movers(n).iter().position(|m| *m == mover) {
            Some(k) => &self.tree_actions[n][k],
            None => &[],
        }
    }

    pub fn tree_nodes(&self, t: TreeIdx) -> &[NodeIdx] {
        &self.tree_nodes[t]
    }

    pub fn tree_root(&self, t: TreeIdx) -> Option<NodeIdx> {
        self.tree_nodes[t].iter().copied().find(|n| self.parent[*n].is_none())
    }

    pub fn tree_by_name(&self, name: &str) -> Option<TreeIdx> {
        self.trees.iter().position(|t| t.name == name)
    }

    /// Ancestors of `n` within its tree, nearest first.
    pub fn ancestors(&self, n: NodeIdx) -> Vec<NodeIdx> {
        let mut out = Vec::new();
        let mut cur = n;
        while let Some((p, _)) = &self.parent[cur] {
            out.push(*p);
            cur = *p;
        }
        out
    }

    pub fn is_ancestor(&self, a: NodeIdx, n: NodeIdx) -> bool {
        self.tree_of(a) == self.tree_of(n) && self.depth[a] < self.depth[n] && {
            let mut cur = n;
            while self.depth[cur] > self.depth[a] {
                cur = self.parent[cur].as_ref().unwrap().0;
            }
            cur == a
        }
    }

    /// Action of `mover` on the edge from the ancestor `a` toward `n`.
    pub fn action_toward(&self, a: NodeIdx, n: NodeIdx, mover: Player) -> Option<ActionId> {
        let mut cur = n;
        while let Some((p, profile)) = &self.parent[cur] {
            if *p == a {
                let k = self.movers(a).iter().position(|m| *m == mover)?;
                return Some(profile[k]);
            }
            cur = *p;
        }
        None
    }

    pub fn node_label(&self, n: NodeIdx) -> String {
        let nr = self.nodes[n];
        format!("{}.{}", self.trees[nr.tree].name, self.arena.nodes[nr.arena].name)
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeIdx> {
        let (t, a) = label.split_once('.')?;
        self.node_at(self.tree_by_name(t)?, self.arena.node_by_name(a)?)
    }

    pub fn payoff(&self, n: NodeIdx, player: Player) -> &Q {
        &self.arena_node(n).payoffs[player - 1]
    }

    pub fn players(&self) -> std::ops::RangeInclusive<Player> {
        1..=self.num_players
    }

    /// Fixed nature distribution at `n`, renormalized over the tree-local actions.
    pub fn local_chance(&self, n: NodeIdx) -> Option<Vec<Q>> {
        let an = self.arena_node(n);
        let w = an.chance.as_ref()?;
        let k = an.movers.iter().position(|m| *m == NATURE)?;
        let local = &self.tree_actions[n][k];
        let kept: Vec<Q> =
            an.actions[k].iter().zip(w).filter(|(a, _)| local.contains(a)).map(|(_, q)| q.clone()).collect();
        let total: Q = kept.iter().sum();
        if total == crate::rational::zero() {
            let u = Q::new(1.into(), (kept.len() as i64).into());
            return Some(vec![u; kept.len()]);
        }
        Some(kept.into_iter().map(|q| q / &total).collect())
    }

    // ---- lattice ----

    pub fn leq(&self, a: TreeIdx, b: TreeIdx) -> bool {
        self.leq[a][b]
    }

    /// Least upper bound of two trees; `None` only if the family is not join-closed.
    pub fn join(&self, a: TreeIdx, b: TreeIdx) -> Option<TreeIdx> {
        let ub: Vec<TreeIdx> =
            (0..self.trees.len()).filter(|t| self.leq(a, *t) && self.leq(b, *t)).collect();
        ub.iter().copied().find(|t| ub.iter().all(|u| self.leq(*t, *u)))
    }

    pub fn join_all(&self, trees: impl IntoIterator<Item = TreeIdx>) -> Option<TreeIdx> {
        let mut it = trees.into_iter();
        let first = it.next()?;
        it.try_fold(first, |acc, t| self.join(acc, t))
    }

    /// The copy of `n` in tree `t`. Errs unless `t` lies below the tree of `n`.
    pub fn copy_down(&self, n: NodeIdx, t: TreeIdx) -> Result<Option<NodeIdx>> {
        let nt = self.tree_of(n);
        if !self.leq(t, nt) {
            return Err(Error::Precondition(format!(
                "tree {} is not below tree {}",
                self.trees[t].name, self.trees[nt].name
            )));
        }
        Ok(self.node_at(t, self.nodes[n].arena))
    }

    /// Copy of the arena node in any tree, no order precondition.
    pub fn copy_in(&self, n: NodeIdx, t: TreeIdx) -> Option<NodeIdx> {
        self.node_at(t, self.nodes[n].arena)
    }

    /// Longest strictly increasing chain length from `t` to the top.
    pub fn height_above(&self, t: TreeIdx) -> usize {
        let above: Vec<TreeIdx> =
            (0..self.trees.len()).filter(|u| *u != t && self.leq(t, *u)).collect();
        above.iter().map(|u| 1 + self.height_above(*u)).max().unwrap_or(0)
    }

    // ---- information sets ----

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, h: InfosetIdx) -> &Infoset {
        &self.infosets[h]
    }

    pub fn infoset_of(&self, n: NodeIdx, player: Player) -> Option<InfosetIdx> {
        self.assign[n].iter().find(|(p, _)| *p == player).map(|(_, h)| *h)
    }

    /// (player, information set) for every non-nature active player at `n`.
    pub fn active(&self, n: NodeIdx) -> &[(Player, InfosetIdx)] {
        &self.assign[n]
    }

    pub fn player_infosets(&self, player: Player) -> Vec<InfosetIdx> {
        (0..self.infosets.len()).filter(|h| self.infosets[*h].player == player).collect()
    }

    /// H_i^D in canonical order.
    pub fn decision_infosets(&self, player: Player) -> Vec<InfosetIdx> {
        (0..self.infosets.len())
            .filter(|h| self.infosets[*h].player == player && !self.infosets[*h].terminal)
            .collect()
    }

    /// Canonical key of an information set: label of its first member.
    pub fn infoset_key(&self, h: InfosetIdx) -> String {
        self.node_label(self.infosets[h].members[0])
    }

    /// The set holding the labelled node, or else the set assigned at it.
    pub fn infoset_by_key(&self, player: Player, key: &str) -> Option<InfosetIdx> {
        let n = self.node_by_label(key)?;
        (0..self.infosets.len())
            .find(|h| self.infosets[*h].player == player && self.infosets[*h].members.contains(&n))
            .or_else(|| self.infoset_of(n, player))
    }

    /// All nodes (in any tree) whose information set for the owner is `h`.
    pub fn nodes_using(&self, h: InfosetIdx) -> Vec<NodeIdx> {
        let p = self.infosets[h].player;
        (0..self.nodes.len()).filter(|n| self.infoset_of(*n, p) == Some(h)).collect()
    }

    /// h ⇝ h': same player and tree, and every member of h' has a strict ancestor in h.
    pub fn precedes(&self, h: InfosetIdx, h2: InfosetIdx) -> bool {
        let (a, b) = (&self.infosets[h], &self.infosets[h2]);
        h != h2
            && a.player == b.player
            && a.tree == b.tree
            && b.members.iter().all(|m| a.members.iter().any(|x| self.is_ancestor(*x, *m)))
    }

    /// Nature decision nodes across all trees (𝐃_0).
    pub fn nature_nodes(&self) -> Vec<NodeIdx> {
        (0..self.nodes.len()).filter(|n| self.movers(*n).contains(&NATURE)).collect()
    }

    // ---- tree reachability ----

    /// Trees T' ≠ t with t ↣ T'.
    pub fn hooks(&self, t: TreeIdx) -> BTreeSet<TreeIdx> {
        let mut out = BTreeSet::new();
        for n in &self.tree_nodes[t] {
            for (_, h) in &self.assign[*n] {
                let ht = self.infosets[*h].tree;
                if ht != t {
                    out.insert(ht);
                }
            }
        }
        out
    }

    /// Transitive closure of ↣ from `t`, excluding `t` itself.
    pub fn hooks_closure(&self, t: TreeIdx) -> BTreeSet<TreeIdx> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(cur) = stack.pop() {
            for nxt in self.hooks(cur) {
                if nxt != t && out.insert(nxt) {
                    stack.push(nxt);
                }
            }
        }
        out
    }

    /// Trees of the t-partial game: t and every tree hooked from it.
    pub fn partial_trees(&self, t: TreeIdx) -> BTreeSet<TreeIdx> {
        let mut s = self.hooks_closure(t);
        s.insert(t);
        s
    }

    /// The t-partial game, re-rooted so that `t` is its top tree.
    pub fn t_partial(&self, t: TreeIdx) -> Result<Game> {
        let keep = self.partial_trees(t);
        let top = &self.trees[t];
        // Restrict the arena to t's nodes and t-local actions.
        let mut remap = vec![usize::MAX; self.arena.nodes.len()];
        let mut new_nodes: Vec<ArenaNode> = Vec::new();
        for (a, an) in self.arena.nodes.iter().enumerate() {
            if !top.members[a] {
                continue;
            }
            remap[a] = new_nodes.len();
            let ni = self.node_at(t, a).unwrap();
            let actions: Vec<Vec<ActionId>> = self.tree_actions[ni].clone();
            let chance = self.local_chance(ni);
            new_nodes.push(ArenaNode {
                name: an.name.clone(),
                parent: an.parent.clone(),
                movers: an.movers.clone(),
                actions,
                children: an.children.iter().filter(|(_, c)| top.members[*c]).cloned().collect(),
                payoffs: an.payoffs.clone(),
                chance,
            });
        }
        for n in &mut new_nodes {
            if let Some((p, _)) = &mut n.parent {
                *p = remap[*p];
            }
            for (_, c) in &mut n.children {
                *c = remap[*c];
            }
        }
        let arena = Arena { nodes: new_nodes, action_names: self.arena.action_names.clone() };
        let restrict = |m: &[bool]| -> Vec<bool> {
            (0..self.arena.nodes.len()).filter(|a| top.members[*a]).map(|a| m[a]).collect()
        };
        let full_members = vec![true; arena.nodes.len()];
        let mut trees = Vec::new();
        for &k in &keep {
            let members = restrict(&self.trees[k].members);
            let def = if k == t {
                TreeDef::Full
            } else {
                TreeDef::Subtree {
                    base: top.name.clone(),
                    exclude: exclusions_between(&arena, &full_members, &members),
                }
            };
            trees.push(Tree { name: self.trees[k].name.clone(), def, members });
        }
        let mut decls = Vec::new();
        for (n, per) in self.assign.iter().enumerate() {
            let nr = self.nodes[n];
            if !keep.contains(&nr.tree) {
                continue;
            }
            for (p, h) in per {
                decls.push(InfosetDecl {
                    player: *p,
                    at: (self.trees[nr.tree].name.clone(), remap[nr.arena]),
                    members: self.infosets[*h]
                        .members
                        .iter()
                        .map(|m| {
                            let mr = self.nodes[*m];
                            (self.trees[mr.tree].name.clone(), remap[mr.arena])
                        })
                        .collect(),
                });
            }
        }
        if decls.iter().any(|d| d.members.iter().any(|(_, a)| *a == usize::MAX)) {
            return Err(Error::Structure("partial game references nodes outside its top tree".into()));
        }
        Game::build(self.name.clone(), self.num_players, self.nature, arena, trees, &decls)
    }
}

/// Minimal exclusion list turning `base` membership into `target` membership.
pub fn exclusions_between(arena: &Arena, base: &[bool], target: &[bool]) -> Vec<(ArenaIdx, ActionId)> {
    let mut out = Vec::new();
    for (idx, n) in arena.nodes.iter().enumerate() {
        if !base[idx] || !target[idx] {
            continue;
        }
        for (k, acts) in n.actions.iter().enumerate() {
            for a in acts {
                let with_a: Vec<ArenaIdx> = n
                    .children
                    .iter()
                    .filter(|(pr, c)| pr[k] == *a && base[*c])
                    .map(|(_, c)| *c)
                    .collect();
                if !with_a.is_empty() && with_a.iter().all(|c| !target[*c]) {
                    out.push((idx, *a));
                }
            }
        }
    }
    out
}
