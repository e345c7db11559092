//! Pure, mixed and behavioral strategies; reach and visit semantics.
//!
//! A player's strategy is a vector of actions aligned with the player's
//! slots: decision information sets for players, decision nodes for nature.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{ActionId, Game, InfosetIdx, NodeIdx, Player, TreeIdx, NATURE, TOP};
use crate::rational::{one, zero, Q};
use crate::validate::{validate, Axiom};

pub const DEFAULT_STRATEGY_CAP: u128 = 1_000_000;

pub type PureStrategy = Vec<ActionId>;
/// One distribution per slot, aligned with the slot's actions.
pub type Behavior = Vec<Vec<Q>>;
pub type Mixed = Vec<(PureStrategy, Q)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub infoset: Option<InfosetIdx>,
    pub node: Option<NodeIdx>,
    pub actions: Vec<ActionId>,
}

#[derive(Clone, Debug)]
pub struct Space {
    /// Slots per player, index 0 is nature.
    pub players: Vec<Vec<Slot>>,
    infoset_slot: Vec<usize>,
    node_slots: Vec<Vec<usize>>,
}

impl Space {
    fn new(g: &Game) -> Space {
        let mut players = vec![Vec::new(); g.num_players + 1];
        let mut infoset_slot = vec![usize::MAX; g.infosets().len()];
        for (h, hs) in g.infosets().iter().enumerate() {
            if !hs.terminal {
                infoset_slot[h] = players[hs.player].len();
                players[hs.player].push(Slot { infoset: Some(h), node: None, actions: hs.actions.clone() });
            }
        }
        let mut node_slots = Vec::with_capacity(g.num_nodes());
        for n in 0..g.num_nodes() {
            let mut row = Vec::new();
            for &m in g.movers(n) {
                if m == NATURE {
                    row.push(players[0].len());
                    players[0].push(Slot { infoset: None, node: Some(n), actions: g.actions_at(n, NATURE).to_vec() });
                } else {
                    row.push(g.infoset_of(n, m).map(|h| infoset_slot[h]).unwrap_or(usize::MAX));
                }
            }
            node_slots.push(row);
        }
        Space { players, infoset_slot, node_slots }
    }

    pub fn slots(&self, p: Player) -> &[Slot] {
        &self.players[p]
    }

    pub fn slot_of_infoset(&self, h: InfosetIdx) -> Option<usize> {
        Some(self.infoset_slot[h]).filter(|s| *s != usize::MAX)
    }

    /// Slot consulted for the k-th mover at node n.
    pub fn node_slot(&self, n: NodeIdx, k: usize) -> usize {
        self.node_slots[n][k]
    }

    pub fn count(&self, p: Player) -> u128 {
        self.players[p].iter().fold(1u128, |acc, s| acc.saturating_mul(s.actions.len() as u128))
    }
}

impl Game {
    pub fn space(&self) -> &Space {
        self.space.get_or_init(|| Space::new(self))
    }
}

/// How one player's moves are determined.
#[derive(Clone, Copy, Debug)]
pub enum PlayerMoves<'a> {
    Pure(&'a [ActionId]),
    Behavior(&'a [Vec<Q>]),
    /// Every action has weight one: used for "some completion reaches".
    Free,
}

/// Moves of every player, index 0 is nature.
#[derive(Clone, Debug)]
pub struct Moves<'a>(pub Vec<PlayerMoves<'a>>);

impl<'a> Moves<'a> {
    pub fn pure(profile: &'a [PureStrategy]) -> Moves<'a> {
        Moves(profile.iter().map(|s| PlayerMoves::Pure(s)).collect())
    }

    pub fn behavior(profile: &'a [Behavior]) -> Moves<'a> {
        Moves(profile.iter().map(|s| PlayerMoves::Behavior(s)).collect())
    }

    pub fn with(mut self, p: Player, m: PlayerMoves<'a>) -> Moves<'a> {
        self.0[p] = m;
        self
    }

    pub fn free(g: &Game) -> Moves<'a> {
        Moves(vec![PlayerMoves::Free; g.num_players + 1])
    }
}

enum W<'q> {
    Zero,
    One,
    Q(&'q Q),
}

fn weight<'a>(g: &Game, moves: &'a Moves, n: NodeIdx, k: usize, mover: Player, a: ActionId) -> W<'a> {
    let slot = g.space().node_slot(n, k);
    if slot == usize::MAX {
        return W::Zero;
    }
    let actions = &g.space().players[mover][slot].actions;
    match moves.0[mover] {
        PlayerMoves::Free => W::One,
        PlayerMoves::Pure(s) => {
            if s[slot] == a {
                W::One
            } else {
                W::Zero
            }
        }
        PlayerMoves::Behavior(b) => match actions.iter().position(|x| *x == a) {
            Some(i) if b[slot][i] != zero() => W::Q(&b[slot][i]),
            _ => W::Zero,
        },
    }
}

/// Probability of the edge from `n` along `profile`.
pub fn edge_prob(g: &Game, moves: &Moves, n: NodeIdx, profile: &[ActionId]) -> Q {
    let mut p = one();
    for (k, (&mover, &a)) in g.movers(n).iter().zip(profile).enumerate() {
        match weight(g, moves, n, k, mover, a) {
            W::Zero => return zero(),
            W::One => {}
            W::Q(q) => p *= q,
        }
    }
    p
}

fn edge_possible(g: &Game, moves: &Moves, n: NodeIdx, profile: &[ActionId]) -> bool {
    g.movers(n)
        .iter()
        .zip(profile)
        .enumerate()
        .all(|(k, (&mover, &a))| !matches!(weight(g, moves, n, k, mover, a), W::Zero))
}

/// Tree-local probability that play reaches `n` in its own tree.
pub fn reach_prob(g: &Game, moves: &Moves, n: NodeIdx) -> Q {
    let mut p = one();
    let mut cur = n;
    while let Some((par, profile)) = g.parent(cur) {
        let e = edge_prob(g, moves, *par, profile);
        if e == zero() {
            return e;
        }
        p *= e;
        cur = *par;
    }
    p
}

pub fn reaches(g: &Game, moves: &Moves, n: NodeIdx) -> bool {
    let mut cur = n;
    while let Some((par, profile)) = g.parent(cur) {
        if !edge_possible(g, moves, *par, profile) {
            return false;
        }
        cur = *par;
    }
    true
}

pub fn reaches_infoset(g: &Game, moves: &Moves, h: InfosetIdx) -> bool {
    g.infoset(h).members.iter().any(|n| reaches(g, moves, *n))
}

/// Probability that play in the top tree passes the copy of `n` there.
pub fn visit_prob(g: &Game, moves: &Moves, n: NodeIdx) -> Q {
    reach_prob(g, moves, g.node_at(TOP, g.node(n).arena).unwrap())
}

pub fn visits(g: &Game, moves: &Moves, n: NodeIdx) -> bool {
    reaches(g, moves, g.node_at(TOP, g.node(n).arena).unwrap())
}

pub fn visits_infoset(g: &Game, moves: &Moves, h: InfosetIdx) -> bool {
    g.infoset(h).members.iter().any(|n| visits(g, moves, *n))
}

/// Expected payoff of `i` from node `n` on, under tree-local play.
pub fn expected_from(g: &Game, moves: &Moves, n: NodeIdx, i: Player) -> Q {
    if g.is_terminal(n) {
        return g.payoff(n, i).clone();
    }
    let mut v = zero();
    for (profile, c) in g.children(n) {
        let e = edge_prob(g, moves, n, profile);
        if e != zero() {
            v += e * expected_from(g, moves, *c, i);
        }
    }
    v
}

/// Positive-probability nodes of tree `t` under tree-local play, with probabilities.
pub fn reach_table(g: &Game, moves: &Moves, t: TreeIdx) -> Vec<(NodeIdx, Q)> {
    let mut out = Vec::new();
    let Some(root) = g.tree_root(t) else { return out };
    let mut stack = vec![(root, one())];
    while let Some((n, p)) = stack.pop() {
        for (profile, c) in g.children(n).iter().rev() {
            let e = edge_prob(g, moves, n, profile);
            if e != zero() {
                stack.push((*c, &p * e));
            }
        }
        out.push((n, p));
    }
    out
}

/// Distribution over terminal nodes of tree `t` under tree-local play.
pub fn terminal_dist(g: &Game, moves: &Moves, t: TreeIdx) -> Vec<(NodeIdx, Q)> {
    let mut v: Vec<(NodeIdx, Q)> = reach_table(g, moves, t).into_iter().filter(|(n, _)| g.is_terminal(*n)).collect();
    v.sort_by_key(|(n, _)| *n);
    v
}

/// Paths of tree `t` visited under the profile, with probabilities. Each is
/// the maximal prefix of the top-tree play path that has copies in `t`.
pub fn path_dist(g: &Game, moves: &Moves, t: TreeIdx) -> Vec<(Vec<NodeIdx>, Q)> {
    let mut acc: BTreeMap<Vec<NodeIdx>, Q> = BTreeMap::new();
    for (z, p) in terminal_dist(g, moves, TOP) {
        let mut top_path = g.ancestors(z);
        top_path.reverse();
        top_path.push(z);
        let projected: Vec<NodeIdx> = top_path.iter().map_while(|n| g.copy_in(*n, t)).collect();
        *acc.entry(projected).or_insert_with(zero) += p;
    }
    acc.into_iter().collect()
}

/// The unique visited path of a pure profile in tree `t`.
pub fn path(g: &Game, profile: &[PureStrategy], t: TreeIdx) -> Vec<NodeIdx> {
    let moves = Moves::pure(profile);
    path_dist(g, &moves, t).into_iter().next().map(|(p, _)| p).unwrap_or_default()
}

/// H̃_i(p(·, t)): information sets of `i` at i-active nodes of positive-probability paths in `t`.
pub fn visited_infosets(g: &Game, moves: &Moves, t: TreeIdx, i: Player) -> BTreeSet<InfosetIdx> {
    let mut out = BTreeSet::new();
    for (p, _) in path_dist(g, moves, t) {
        for n in p {
            if let Some(h) = g.infoset_of(n, i) {
                out.insert(h);
            }
        }
    }
    out
}

/// H_i(s): information sets of `i` reached under tree-local play, across all trees.
pub fn reached_infosets(g: &Game, moves: &Moves, i: Player) -> BTreeSet<InfosetIdx> {
    g.player_infosets(i).into_iter().filter(|h| reaches_infoset(g, moves, *h)).collect()
}

fn require_nature(g: &Game, moves: &Moves) -> Result<()> {
    if g.nature && matches!(moves.0[NATURE], PlayerMoves::Free) && !g.space().players[NATURE].is_empty() {
        return Err(Error::MissingNature);
    }
    Ok(())
}

/// Expected payoff of `i` in tree `t` under tree-local play.
pub fn payoff(g: &Game, moves: &Moves, t: TreeIdx, i: Player) -> Result<Q> {
    require_nature(g, moves)?;
    Ok(terminal_dist(g, moves, t).into_iter().map(|(z, p)| p * g.payoff(z, i)).sum())
}

/// Fixed chance distributions as a nature behavior, if every nature node carries one.
pub fn chance_behavior(g: &Game) -> Option<Behavior> {
    g.space().players[NATURE].iter().map(|s| g.local_chance(s.node.unwrap())).collect()
}

pub fn enumerate_pure(g: &Game, i: Player, cap: u128) -> Result<Vec<PureStrategy>> {
    let slots = &g.space().players[i];
    let size = g.space().count(i);
    if size > cap {
        return Err(Error::CapExceeded { what: format!("strategies of player {i}"), size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur: Vec<usize> = vec![0; slots.len()];
    loop {
        out.push(cur.iter().zip(slots).map(|(k, s)| s.actions[*k]).collect());
        let mut pos = slots.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < slots[pos].actions.len() {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// Does the strategy of `i` permit reaching `h` against some completion?
pub fn own_reaches(g: &Game, i: Player, s: &[ActionId], h: InfosetIdx) -> bool {
    reaches_infoset(g, &Moves::free(g).with(i, PlayerMoves::Pure(s)), h)
}

/// The strategy of `i` induced on the `t`-partial game, with that game.
pub fn restrict(g: &Game, i: Player, s: &[ActionId], t: TreeIdx) -> Result<(Game, PureStrategy)> {
    let p = g.t_partial(t)?;
    let mut out = Vec::new();
    for slot in &p.space().players[i] {
        let h = slot.infoset.unwrap();
        let key = p.infoset_key(h);
        let gh = g.infoset_by_key(i, &key).ok_or_else(|| Error::Structure(format!("no information set {key}")))?;
        out.push(s[g.space().slot_of_infoset(gh).unwrap()]);
    }
    Ok((p, out))
}

/// Point-mass behavior of a pure strategy.
pub fn behavior_of_pure(g: &Game, p: Player, s: &[ActionId]) -> Behavior {
    g.space().players[p]
        .iter()
        .zip(s)
        .map(|(slot, a)| slot.actions.iter().map(|x| if x == a { one() } else { zero() }).collect())
        .collect()
}

pub fn uniform_behavior(g: &Game, p: Player) -> Behavior {
    g.space().players[p]
        .iter()
        .map(|slot| vec![Q::new(1.into(), (slot.actions.len() as i64).into()); slot.actions.len()])
        .collect()
}

/// Kuhn conversion. Information sets the mixture cannot reach get the uniform distribution.
pub fn behavioral_of_mixed(g: &Game, i: Player, sigma: &[(PureStrategy, Q)]) -> Result<Behavior> {
    if i != NATURE && validate(g).has(Axiom::I6) {
        return Err(Error::Precondition("perfect recall does not hold".into()));
    }
    Ok(kuhn(g, i, sigma))
}

/// Kuhn conversion without the perfect-recall check.
pub(crate) fn kuhn(g: &Game, i: Player, sigma: &[(PureStrategy, Q)]) -> Behavior {
    let slots = &g.space().players[i];
    let mut out = Vec::with_capacity(slots.len());
    for (k, slot) in slots.iter().enumerate() {
        let mut mass = vec![zero(); slot.actions.len()];
        let mut total = zero();
        for (s, w) in sigma {
            let reach = match slot.infoset {
                Some(h) => own_reaches(g, i, s, h),
                None => reaches(g, &Moves::free(g).with(i, PlayerMoves::Pure(s)), slot.node.unwrap()),
            };
            if reach && *w != zero() {
                let a = slot.actions.iter().position(|x| *x == s[k]).unwrap();
                mass[a] += w;
                total += w;
            }
        }
        if total == zero() {
            out.push(vec![Q::new(1.into(), (slot.actions.len() as i64).into()); slot.actions.len()]);
        } else {
            out.push(mass.into_iter().map(|m| m / &total).collect());
        }
    }
    out
}

/// ρ(n | σ_i, s_{-i}) for a mixed strategy of `i` against the other moves.
pub fn reach_prob_mixed(g: &Game, moves: &Moves, i: Player, sigma: &[(PureStrategy, Q)], n: NodeIdx) -> Q {
    sigma
        .iter()
        .filter(|(_, w)| *w != zero())
        .map(|(s, w)| {
            let m = moves.clone().with(i, PlayerMoves::Pure(s));
            if reaches(g, &m, n) {
                reach_prob(g, &m, n) * w
            } else {
                zero()
            }
        })
        .sum()
}

/// Action names of a pure strategy keyed by slot label.
pub fn describe(g: &Game, p: Player, s: &[ActionId]) -> Vec<(String, String)> {
    g.space().players[p]
        .iter()
        .zip(s)
        .map(|(slot, a)| (slot_label(g, slot), g.arena.action_name(*a).to_string()))
        .collect()
}

pub fn slot_label(g: &Game, slot: &Slot) -> String {
    match (slot.infoset, slot.node) {
        (Some(h), _) => g.infoset_key(h),
        (None, Some(n)) => g.node_label(n),
        _ => unreachable!(),
    }
}

/// Parse `label=action` choices (any member label identifies an information set).
pub fn pure_from_names(g: &Game, p: Player, choices: &[(&str, &str)]) -> Result<PureStrategy> {
    let slots = &g.space().players[p];
    let mut out: Vec<Option<ActionId>> = vec![None; slots.len()];
    for (label, action) in choices {
        let k = find_slot(g, p, label)?;
        let a = g
            .arena
            .action_by_name(action)
            .filter(|a| slots[k].actions.contains(a))
            .ok_or_else(|| Error::Profile(format!("action {action} not available at {label}")))?;
        out[k] = Some(a);
    }
    out.into_iter()
        .enumerate()
        .map(|(k, a)| a.ok_or_else(|| Error::Profile(format!("no choice at {}", slot_label(g, &slots[k])))))
        .collect()
}

pub fn find_slot(g: &Game, p: Player, label: &str) -> Result<usize> {
    let sp = g.space();
    let found = if p == NATURE {
        g.node_by_label(label).and_then(|n| sp.players[0].iter().position(|s| s.node == Some(n)))
    } else {
        g.infoset_by_key(p, label).and_then(|h| sp.slot_of_infoset(h))
    };
    found.ok_or_else(|| Error::Profile(format!("player {p} has no decision point {label}")))
}
