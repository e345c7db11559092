//! Belief systems over opponents' local profiles, Bayes consistency,
//! rationality at information sets and the search for rationalizing beliefs.
//!
//! A belief at an information set in tree T ranges over the joint choices of
//! the opponents (and nature) at the decision points consulted by nodes of T.
//! Two partial-game profiles with equal choices there induce identical play
//! in T, so this quotient loses nothing for reach, payoff or rationality.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lp::{Cmp, Lp};
use crate::model::{ActionId, Game, InfosetIdx, NodeIdx, Player, TreeIdx};
use crate::rational::{fmt_q, one, zero, Q};
use crate::strategy::{own_reaches, slot_label};

pub const DEFAULT_PROFILE_CAP: u128 = 200_000;

/// Joint opponent choices at the decision points consulted in one tree.
#[derive(Clone, Debug)]
pub struct LocalProfiles {
    pub tree: TreeIdx,
    /// (player, slot) pairs, sorted.
    pub slots: Vec<(Player, usize)>,
    pub profiles: Vec<Vec<ActionId>>,
    /// Per node of the tree and per mover: position in `slots`, or MAX for the owner.
    pos_at: HashMap<NodeIdx, Vec<usize>>,
    /// reached[p][k]: node k of the tree (in tree order) is reached by profile p when the owner is free.
    reached: Vec<Vec<bool>>,
    order: HashMap<NodeIdx, usize>,
}

impl LocalProfiles {
    fn new(g: &Game, owner: Player, t: TreeIdx, cap: u128) -> Result<LocalProfiles> {
        let sp = g.space();
        let mut set = BTreeSet::new();
        for &n in g.tree_nodes(t) {
            for (k, &m) in g.movers(n).iter().enumerate() {
                if m != owner {
                    set.insert((m, sp.node_slot(n, k)));
                }
            }
        }
        let slots: Vec<(Player, usize)> = set.into_iter().collect();
        let size = slots
            .iter()
            .fold(1u128, |acc, (p, s)| acc.saturating_mul(sp.players[*p][*s].actions.len() as u128));
        if size > cap {
            return Err(Error::CapExceeded {
                what: format!("opponent profiles of player {owner} in tree {}", g.trees[t].name),
                size,
                cap,
            });
        }
        let mut profiles = vec![Vec::with_capacity(slots.len())];
        for (p, s) in &slots {
            let acts = &sp.players[*p][*s].actions;
            profiles = profiles
                .into_iter()
                .flat_map(|prefix| {
                    acts.iter().map(move |a| {
                        let mut v = prefix.clone();
                        v.push(*a);
                        v
                    })
                })
                .collect();
        }
        let index: HashMap<(Player, usize), usize> = slots.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        let mut pos_at = HashMap::new();
        let mut order = HashMap::new();
        for (k, &n) in g.tree_nodes(t).iter().enumerate() {
            order.insert(n, k);
            let row = g
                .movers(n)
                .iter()
                .enumerate()
                .map(|(k, &m)| if m == owner { usize::MAX } else { index[&(m, sp.node_slot(n, k))] })
                .collect();
            pos_at.insert(n, row);
        }
        let mut lp = LocalProfiles { tree: t, slots, profiles, pos_at, reached: Vec::new(), order };
        let reached = (0..lp.profiles.len()).map(|p| lp.reach_vector(g, p)).collect();
        lp.reached = reached;
        Ok(lp)
    }

    fn reach_vector(&self, g: &Game, p: usize) -> Vec<bool> {
        let nodes = g.tree_nodes(self.tree);
        let mut out = vec![false; nodes.len()];
        let root = g.tree_root(self.tree).unwrap();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            out[self.order[&n]] = true;
            let pos = &self.pos_at[&n];
            for (profile, c) in g.children(n) {
                let ok = profile
                    .iter()
                    .zip(pos)
                    .all(|(a, k)| *k == usize::MAX || self.profiles[p][*k] == *a);
                if ok {
                    stack.push(*c);
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Does profile `p` (owner free) reach node `n` of this tree?
    pub fn reaches_node(&self, p: usize, n: NodeIdx) -> bool {
        self.reached[p][self.order[&n]]
    }

    /// Plays from `n` with the owner following `s` until a terminal node.
    pub fn play_from(&self, g: &Game, owner: Player, s: &[ActionId], p: usize, mut n: NodeIdx) -> NodeIdx {
        let sp = g.space();
        loop {
            if g.is_terminal(n) {
                return n;
            }
            let pos = &self.pos_at[&n];
            let want: Vec<ActionId> = g
                .movers(n)
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    if *m == owner {
                        s[sp.node_slot(n, k)]
                    } else {
                        self.profiles[p][pos[k]]
                    }
                })
                .collect();
            match g.children(n).iter().find(|(pr, _)| *pr == want) {
                Some((_, c)) => n = *c,
                None => return n,
            }
        }
    }

    /// Restriction of a full opponent profile (indexed by player) to this tree.
    pub fn index_of(&self, g: &Game, full: &[Vec<ActionId>]) -> Option<usize> {
        let sp = g.space();
        let mut idx = 0usize;
        for (p, s) in &self.slots {
            let acts = &sp.players[*p][*s].actions;
            let k = acts.iter().position(|a| *a == full[*p][*s])?;
            idx = idx * acts.len() + k;
        }
        Some(idx)
    }

    pub fn describe(&self, g: &Game, p: usize) -> Value {
        let sp = g.space();
        let mut m = serde_json::Map::new();
        for ((pl, s), a) in self.slots.iter().zip(&self.profiles[p]) {
            let label = slot_label(g, &sp.players[*pl][*s]);
            m.insert(format!("{pl}:{label}"), Value::String(g.arena.action_name(*a).to_string()));
        }
        Value::Object(m)
    }
}

/// Belief of one player: per information set, weights on local profile indices of its tree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BeliefSystem {
    pub owner: Player,
    pub beliefs: BTreeMap<InfosetIdx, Vec<(usize, Q)>>,
}

/// Allowed local profiles per information set (mask over the tree's profiles).
#[derive(Clone, Debug, Default)]
pub struct Constraints {
    pub allowed: HashMap<InfosetIdx, Vec<bool>>,
}

impl Constraints {
    pub fn none() -> Constraints {
        Constraints::default()
    }
}

/// Precomputed tables for one player of one game.
pub struct PlayerContext<'g> {
    pub g: &'g Game,
    pub owner: Player,
    pub locals: HashMap<TreeIdx, LocalProfiles>,
    /// All information sets of the owner (decision and terminal).
    pub infosets: Vec<InfosetIdx>,
    /// Strict ⇝-successors.
    pub succ: HashMap<InfosetIdx, Vec<InfosetIdx>>,
    /// Closest ⇝-predecessor.
    pub pred: HashMap<InfosetIdx, InfosetIdx>,
    /// reach[h][p]: profile p reaches h when the owner is free.
    pub reach: HashMap<InfosetIdx, Vec<bool>>,
    start: HashMap<InfosetIdx, Vec<Option<NodeIdx>>>,
}

impl<'g> PlayerContext<'g> {
    pub fn new(g: &'g Game, owner: Player) -> Result<PlayerContext<'g>> {
        Self::with_cap(g, owner, DEFAULT_PROFILE_CAP)
    }

    pub fn with_cap(g: &'g Game, owner: Player, cap: u128) -> Result<PlayerContext<'g>> {
        let infosets = g.player_infosets(owner);
        let mut locals = HashMap::new();
        for &h in &infosets {
            let t = g.infoset(h).tree;
            if let std::collections::hash_map::Entry::Vacant(e) = locals.entry(t) {
                e.insert(LocalProfiles::new(g, owner, t, cap)?);
            }
        }
        let mut succ: HashMap<InfosetIdx, Vec<InfosetIdx>> = HashMap::new();
        let mut pred = HashMap::new();
        for &h in &infosets {
            let s: Vec<InfosetIdx> = infosets.iter().copied().filter(|x| g.precedes(h, *x)).collect();
            succ.insert(h, s);
        }
        for &h in &infosets {
            let ps: Vec<InfosetIdx> = infosets.iter().copied().filter(|x| g.precedes(*x, h)).collect();
            // The closest predecessor is the one all others precede.
            if let Some(c) = ps.iter().copied().find(|c| ps.iter().all(|o| o == c || g.precedes(*o, *c))) {
                pred.insert(h, c);
            }
        }
        let mut reach = HashMap::new();
        let mut start = HashMap::new();
        for &h in &infosets {
            let lp = &locals[&g.infoset(h).tree];
            let members = &g.infoset(h).members;
            let st: Vec<Option<NodeIdx>> = (0..lp.len())
                .map(|p| members.iter().copied().find(|m| lp.reaches_node(p, *m)))
                .collect();
            reach.insert(h, st.iter().map(|x| x.is_some()).collect());
            start.insert(h, st);
        }
        Ok(PlayerContext { g, owner, locals, infosets, succ, pred, reach, start })
    }

    pub fn local(&self, h: InfosetIdx) -> &LocalProfiles {
        &self.locals[&self.g.infoset(h).tree]
    }

    fn decision(&self, h: InfosetIdx) -> bool {
        !self.g.infoset(h).terminal
    }

    /// u_i(s_i, p | h): payoff of play from the member of h reached by p.
    pub fn value(&self, s: &[ActionId], p: usize, h: InfosetIdx) -> Q {
        let lp = self.local(h);
        match self.start[&h][p] {
            Some(n) => {
                let z = lp.play_from(self.g, self.owner, s, p, n);
                if self.g.is_terminal(z) {
                    self.g.payoff(z, self.owner).clone()
                } else {
                    zero()
                }
            }
            None => zero(),
        }
    }

    pub fn expected_payoff_at(&self, s: &[ActionId], belief: &[(usize, Q)], h: InfosetIdx) -> Q {
        belief.iter().map(|(p, w)| w * self.value(s, *p, h)).sum()
    }

    /// Strategies equal to `s` except at h and its ⇝-successors.
    pub fn deviations(&self, s: &[ActionId], h: InfosetIdx) -> Vec<Vec<ActionId>> {
        let sp = self.g.space();
        let mut slots: Vec<usize> = std::iter::once(h)
            .chain(self.succ[&h].iter().copied())
            .filter(|x| self.decision(*x))
            .filter_map(|x| sp.slot_of_infoset(x))
            .collect();
        slots.sort_unstable();
        let mut out = vec![s.to_vec()];
        for k in slots {
            let acts = &sp.players[self.owner][k].actions;
            out = out
                .into_iter()
                .flat_map(|d| {
                    acts.iter().map(move |a| {
                        let mut v = d.clone();
                        v[k] = *a;
                        v
                    })
                })
                .collect();
        }
        out.retain(|d| d != s);
        out
    }

    pub fn is_rational_at(&self, s: &[ActionId], belief: &[(usize, Q)], h: InfosetIdx) -> bool {
        if !self.decision(h) || !own_reaches(self.g, self.owner, s, h) {
            return true;
        }
        let base = self.expected_payoff_at(s, belief, h);
        self.deviations(s, h).iter().all(|d| self.expected_payoff_at(d, belief, h) <= base)
    }

    fn mass(&self, belief: &[(usize, Q)], h: InfosetIdx) -> Q {
        let r = &self.reach[&h];
        belief.iter().filter(|(p, _)| r[*p]).map(|(_, w)| w.clone()).sum()
    }

    fn conditional(&self, belief: &[(usize, Q)], h: InfosetIdx) -> Vec<(usize, Q)> {
        let r = &self.reach[&h];
        let m = self.mass(belief, h);
        belief.iter().filter(|(p, w)| r[*p] && *w != zero()).map(|(p, w)| (*p, w / &m)).collect()
    }

    /// First information set (in canonical order) where reaching, support or Bayes fails.
    pub fn bayes_violation(&self, beta: &BeliefSystem) -> Option<InfosetIdx> {
        for &h in &self.infosets {
            let Some(b) = beta.beliefs.get(&h) else { return Some(h) };
            let total: Q = b.iter().map(|(_, w)| w.clone()).sum();
            if total != one() || b.iter().any(|(p, w)| *w < zero() || (*w != zero() && !self.reach[&h][*p])) {
                return Some(h);
            }
        }
        for &h in &self.infosets {
            let b = &beta.beliefs[&h];
            for &h2 in &self.succ[&h] {
                if self.mass(b, h2) != zero() && normalize(&self.conditional(b, h2)) != normalize(&beta.beliefs[&h2]) {
                    return Some(h2);
                }
            }
        }
        None
    }

    pub fn is_bayes_consistent(&self, beta: &BeliefSystem) -> bool {
        self.bayes_violation(beta).is_none()
    }

    /// Allowed ∩ reach, falling back to reach when the intersection is empty.
    pub fn allowed_at(&self, c: &Constraints, h: InfosetIdx) -> Vec<bool> {
        let r = &self.reach[&h];
        match c.allowed.get(&h) {
            Some(mask) => {
                let both: Vec<bool> = r.iter().zip(mask).map(|(a, b)| *a && *b).collect();
                if both.iter().any(|x| *x) {
                    both
                } else {
                    r.clone()
                }
            }
            None => r.clone(),
        }
    }

    /// Full audit of a witness: Bayes, support constraints, rationality.
    pub fn audit(&self, s: &[ActionId], c: &Constraints, beta: &BeliefSystem) -> std::result::Result<(), String> {
        if let Some(h) = self.bayes_violation(beta) {
            return Err(format!("Bayes or reaching fails at {}", self.g.infoset_key(h)));
        }
        for &h in &self.infosets {
            let allowed = self.allowed_at(c, h);
            if beta.beliefs[&h].iter().any(|(p, w)| *w != zero() && !allowed[*p]) {
                return Err(format!("support constraint fails at {}", self.g.infoset_key(h)));
            }
            if !self.is_rational_at(s, &beta.beliefs[&h], h) {
                return Err(format!("not rational at {}", self.g.infoset_key(h)));
            }
        }
        Ok(())
    }

    pub fn belief_json(&self, beta: &BeliefSystem) -> Value {
        let mut m = serde_json::Map::new();
        for (h, b) in &beta.beliefs {
            let lp = self.local(*h);
            let list: Vec<Value> = b
                .iter()
                .filter(|(_, w)| *w != zero())
                .map(|(p, w)| json!({"profile": lp.describe(self.g, *p), "weight": fmt_q(w)}))
                .collect();
            m.insert(self.g.infoset_key(*h), Value::Array(list));
        }
        Value::Object(m)
    }
}

fn normalize(b: &[(usize, Q)]) -> Vec<(usize, Q)> {
    let mut v: Vec<(usize, Q)> = b.iter().filter(|(_, w)| *w != zero()).cloned().collect();
    v.sort();
    v
}

/// Are the constraint masks nested along ⇝ (successors allow every allowed reaching profile)?
fn nested(ctx: &PlayerContext, c: &Constraints) -> bool {
    ctx.infosets.iter().all(|&h| {
        let a = ctx.allowed_at(c, h);
        ctx.succ[&h].iter().all(|&h2| {
            let b = ctx.allowed_at(c, h2);
            let r = &ctx.reach[&h2];
            a.iter().zip(r).zip(&b).all(|((x, y), z)| !(*x && *y) || *z)
        })
    })
}

type Assignment = BTreeMap<InfosetIdx, Vec<(usize, Q)>>;

struct Search<'a, 'g> {
    ctx: &'a PlayerContext<'g>,
    s: &'a [ActionId],
    c: &'a Constraints,
    nested: bool,
    own: HashMap<InfosetIdx, bool>,
    memo: HashMap<InfosetIdx, Option<Assignment>>,
}

impl<'a, 'g> Search<'a, 'g> {
    fn needs_rationality(&self, h: InfosetIdx) -> bool {
        self.ctx.decision(h) && self.own[&h]
    }

    fn relevant(&self, h: InfosetIdx) -> bool {
        !self.nested || self.needs_rationality(h)
    }

    fn topo(&self, mut v: Vec<InfosetIdx>) -> Vec<InfosetIdx> {
        let g = self.ctx.g;
        v.sort_by_key(|h| (g.depth(g.infoset(*h).members[0]), *h));
        v
    }

    /// Upward-closed subsets of `rel`, smallest first then lexicographic.
    fn patterns(&self, rel: &[InfosetIdx]) -> Vec<Vec<InfosetIdx>> {
        let g = self.ctx.g;
        let mut out = Vec::new();
        fn rec(
            g: &Game,
            rel: &[InfosetIdx],
            k: usize,
            cur: &mut Vec<InfosetIdx>,
            out: &mut Vec<Vec<InfosetIdx>>,
        ) {
            if k == rel.len() {
                out.push(cur.clone());
                return;
            }
            let h = rel[k];
            let forced = cur.iter().any(|x| g.precedes(*x, h));
            if !forced {
                rec(g, rel, k + 1, cur, out);
            }
            cur.push(h);
            rec(g, rel, k + 1, cur, out);
            cur.pop();
        }
        rec(g, rel, 0, &mut Vec::new(), &mut out);
        for z in &mut out {
            z.sort_unstable();
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    fn solve_root(&mut self, h: InfosetIdx) -> Option<Assignment> {
        if let Some(r) = self.memo.get(&h) {
            return r.clone();
        }
        let r = self.solve_root_uncached(h);
        self.memo.insert(h, r.clone());
        r
    }

    fn solve_root_uncached(&mut self, h: InfosetIdx) -> Option<Assignment> {
        let ctx = self.ctx;
        let allowed = ctx.allowed_at(self.c, h);
        let succ = self.topo(ctx.succ[&h].clone());
        let rel: Vec<InfosetIdx> = succ.iter().copied().filter(|x| self.relevant(*x)).collect();
        'pattern: for z in self.patterns(&rel) {
            let minimal: Vec<InfosetIdx> =
                z.iter().copied().filter(|x| !z.iter().any(|y| ctx.g.precedes(*y, *x))).collect();
            let mut subs = Vec::new();
            for m in &minimal {
                match self.solve_root(*m) {
                    Some(a) => subs.push(a),
                    None => continue 'pattern,
                }
            }
            let positive: Vec<InfosetIdx> = rel.iter().copied().filter(|x| !z.contains(x)).collect();
            let vars: Vec<usize> = (0..allowed.len())
                .filter(|p| allowed[*p])
                .filter(|p| !z.iter().any(|x| ctx.reach[x][*p]))
                .filter(|p| {
                    positive.iter().all(|x| !ctx.reach[x][*p] || ctx.allowed_at(self.c, *x)[*p])
                })
                .collect();
            if vars.is_empty() {
                continue;
            }
            let Some(weights) = self.lp(h, &vars, &positive) else { continue };
            let mut out: Assignment = BTreeMap::new();
            let total: Q = weights.iter().sum();
            let root: Vec<(usize, Q)> = vars
                .iter()
                .zip(&weights)
                .filter(|(_, w)| **w != zero())
                .map(|(p, w)| (*p, w / &total))
                .collect();
            out.insert(h, root);
            for sub in subs {
                out.extend(sub);
            }
            for &x in &succ {
                if out.contains_key(&x) {
                    continue;
                }
                let parent = &out[&ctx.pred[&x]];
                let b = if ctx.mass(parent, x) != zero() {
                    ctx.conditional(parent, x)
                } else {
                    let a = ctx.allowed_at(self.c, x);
                    vec![(a.iter().position(|v| *v).unwrap(), one())]
                };
                out.insert(x, b);
            }
            return Some(out);
        }
        None
    }

    /// Homogeneous feasibility problem for one support pattern; weights aligned with `vars`.
    fn lp(&self, h: InfosetIdx, vars: &[usize], positive: &[InfosetIdx]) -> Option<Vec<Q>> {
        let ctx = self.ctx;
        let mut rows: Vec<(Vec<Q>, Q)> = vec![(vec![one(); vars.len()], one())];
        for &x in positive {
            let r = &ctx.reach[&x];
            let row: Vec<Q> = vars.iter().map(|p| if r[*p] { one() } else { zero() }).collect();
            if row.iter().all(|q| *q == zero()) {
                return None;
            }
            rows.push((row, one()));
        }
        let mut seen = BTreeSet::new();
        for x in std::iter::once(h).chain(positive.iter().copied()) {
            if !self.needs_rationality(x) {
                continue;
            }
            let r = &ctx.reach[&x];
            let base: Vec<Q> = vars.iter().map(|p| if r[*p] { ctx.value(self.s, *p, x) } else { zero() }).collect();
            for d in ctx.deviations(self.s, x) {
                let row: Vec<Q> = vars
                    .iter()
                    .zip(&base)
                    .map(|(p, b)| if r[*p] { b - ctx.value(&d, *p, x) } else { zero() })
                    .collect();
                if row.iter().all(|q| *q >= zero()) {
                    continue;
                }
                if seen.insert(row.clone()) {
                    rows.push((row, zero()));
                }
            }
        }
        // Merge identical columns.
        let mut groups: BTreeMap<Vec<Q>, Vec<usize>> = BTreeMap::new();
        for k in 0..vars.len() {
            let sig: Vec<Q> = rows.iter().map(|(r, _)| r[k].clone()).collect();
            groups.entry(sig).or_default().push(k);
        }
        let mut cols: Vec<(Vec<Q>, usize)> = groups.into_iter().map(|(sig, ks)| (sig, ks[0])).collect();
        cols.sort_by_key(|(_, k)| *k);
        let mut lp = Lp::new(cols.len());
        for (ri, (_, rhs)) in rows.iter().enumerate() {
            let coeffs = cols.iter().enumerate().map(|(j, (sig, _))| (j, sig[ri].clone())).collect();
            lp.add(coeffs, Cmp::Ge, rhs.clone());
        }
        let sol = lp.solve()?;
        let mut w = vec![zero(); vars.len()];
        for ((_, k), v) in cols.iter().zip(sol) {
            w[*k] = v;
        }
        Some(w)
    }
}

/// A belief system rationalizing `s` under the support constraints, if one exists.
pub fn exists_rationalizing_belief_system(ctx: &PlayerContext, s: &[ActionId], c: &Constraints) -> Option<BeliefSystem> {
    let own = ctx.infosets.iter().map(|h| (*h, own_reaches(ctx.g, ctx.owner, s, *h))).collect();
    let mut search = Search { ctx, s, c, nested: nested(ctx, c), own, memo: HashMap::new() };
    let mut beliefs = BTreeMap::new();
    for &h in &ctx.infosets {
        if ctx.pred.contains_key(&h) {
            continue;
        }
        beliefs.extend(search.solve_root(h)?);
    }
    let beta = BeliefSystem { owner: ctx.owner, beliefs };
    if let Err(e) = ctx.audit(s, c, &beta) {
        panic!("witness failed its audit: {e}");
    }
    Some(beta)
}

/// Constraint masks from a set of full opponent profiles (index = player, nature at 0).
pub fn mask_from_profiles<'p>(
    ctx: &PlayerContext,
    h: InfosetIdx,
    profiles: impl IntoIterator<Item = &'p [Vec<ActionId>]>,
) -> Vec<bool> {
    let lp = ctx.local(h);
    let mut mask = vec![false; lp.len()];
    for full in profiles {
        if let Some(k) = lp.index_of(ctx.g, full) {
            mask[k] = true;
        }
    }
    mask
}

/// Mask of local profiles whose choices of each opponent lie in the given per-player sets.
pub fn mask_from_sets(ctx: &PlayerContext, h: InfosetIdx, sets: &[Option<&[Vec<ActionId>]>]) -> Vec<bool> {
    let lp = ctx.local(h);
    let mut allowed_tuples: HashMap<Player, BTreeSet<Vec<ActionId>>> = HashMap::new();
    let mut slots_of: HashMap<Player, Vec<usize>> = HashMap::new();
    for (k, (p, _)) in lp.slots.iter().enumerate() {
        slots_of.entry(*p).or_default().push(k);
    }
    for (p, ks) in &slots_of {
        if let Some(Some(set)) = sets.get(*p) {
            let tuples = set.iter().map(|s| ks.iter().map(|k| s[lp.slots[*k].1]).collect()).collect();
            allowed_tuples.insert(*p, tuples);
        }
    }
    (0..lp.len())
        .map(|q| {
            allowed_tuples.iter().all(|(p, tuples)| {
                let t: Vec<ActionId> = slots_of[p].iter().map(|k| lp.profiles[q][*k]).collect();
                tuples.contains(&t)
            })
        })
        .collect()
}
