//! Self-confirming equilibrium along the path, and its rationalizable refinement.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::belief::{BeliefSystem, LocalProfiles, PlayerContext};
use crate::efr::EfrResult;
use crate::error::{Error, Result};
use crate::exec;
use crate::lp::{Cmp, Lp};
use crate::model::{Game, InfosetIdx, Player, TreeIdx, NATURE, TOP};
use crate::profile::Profile;
use crate::rational::{fmt_q, one, zero, Q};
use crate::strategy::{
    behavioral_of_mixed, chance_behavior, expected_from, path_dist, reach_prob, visited_infosets, Behavior, Mixed,
    Moves, PlayerMoves, PureStrategy,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition0 {
    pub holds: bool,
    /// The tree hosting every visited set, when it holds.
    pub tree: Option<String>,
    /// Two visited sets in different trees, when it fails.
    pub pair: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub holds: bool,
    pub at: Option<String>,
}

#[derive(Clone, Debug)]
pub struct PlayerReport {
    pub player: Player,
    pub visited: Vec<String>,
    pub condition0: Condition0,
    pub condition_i: Clause,
    pub condition_ii: Clause,
    pub beliefs: Option<BeliefSystem>,
}

impl PlayerReport {
    pub fn holds(&self) -> bool {
        self.condition0.holds && self.condition_i.holds && self.condition_ii.holds
    }
}

#[derive(Clone, Debug)]
pub struct SceReport {
    pub verdict: bool,
    pub players: Vec<PlayerReport>,
}

impl SceReport {
    pub fn player(&self, i: Player) -> &PlayerReport {
        self.players.iter().find(|r| r.player == i).unwrap()
    }

    pub fn to_json(&self, g: &Game) -> Result<Value> {
        let mut players = serde_json::Map::new();
        for r in &self.players {
            let ctx = PlayerContext::new(g, r.player)?;
            let c0 = json!({
                "holds": r.condition0.holds,
                "tree": r.condition0.tree,
                "pair": r.condition0.pair.as_ref().map(|(a, b)| json!([a, b])),
            });
            players.insert(
                r.player.to_string(),
                json!({
                    "visited": r.visited,
                    "condition0": c0,
                    "condition_i": {"holds": r.condition_i.holds, "at": r.condition_i.at},
                    "condition_ii": {"holds": r.condition_ii.holds, "at": r.condition_ii.at},
                    "beliefs": r.beliefs.as_ref().map(|b| ctx.belief_json(b)),
                }),
            );
        }
        Ok(json!({"schema": "ugt.sce/1", "game": g.name, "verdict": self.verdict, "players": players}))
    }
}

fn require_total(g: &Game, pi: &Profile) -> Result<()> {
    if pi.behaviors.len() != g.num_players + 1 {
        return Err(Error::Profile("profile must cover every player".into()));
    }
    for p in 0..=g.num_players {
        let slots = g.space().slots(p);
        if pi.behaviors[p].len() != slots.len()
            || pi.behaviors[p].iter().zip(slots).any(|(d, s)| d.len() != s.actions.len())
        {
            return Err(if p == NATURE { Error::MissingNature } else { Error::Profile(format!("player {p} is incomplete")) });
        }
    }
    Ok(())
}

/// Per-player pure strategies realizing local profile `p`; unlisted slots take their first action.
fn completion(g: &Game, lp: &LocalProfiles, p: usize) -> Vec<PureStrategy> {
    let sp = g.space();
    let mut out: Vec<PureStrategy> =
        (0..=g.num_players).map(|j| sp.slots(j).iter().map(|s| s.actions[0]).collect()).collect();
    for ((j, k), a) in lp.slots.iter().zip(&lp.profiles[p]) {
        out[*j][*k] = *a;
    }
    out
}

/// Opponent decision points met along the visited paths of tree `t`.
fn agreement_slots(g: &Game, pi: &Profile, t: TreeIdx, owner: Player) -> BTreeSet<(Player, usize)> {
    let sp = g.space();
    let mut out = BTreeSet::new();
    for (path, _) in path_dist(g, &pi.moves(), t) {
        for n in path {
            for (k, &m) in g.movers(n).iter().enumerate() {
                if m != owner {
                    out.insert((m, sp.node_slot(n, k)));
                }
            }
        }
    }
    out
}

struct Group {
    tree: TreeIdx,
    decisions: Vec<InfosetIdx>,
    terminals: Vec<InfosetIdx>,
}

fn groups(g: &Game, visited: &[InfosetIdx]) -> Vec<Group> {
    let mut parent: Vec<usize> = (0..visited.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, &h) in visited.iter().enumerate() {
        if !g.infoset(h).terminal {
            continue;
        }
        for (b, &h2) in visited.iter().enumerate() {
            if !g.infoset(h2).terminal && g.precedes(h2, h) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut by_root: BTreeMap<usize, Group> = BTreeMap::new();
    for (a, &h) in visited.iter().enumerate() {
        let r = find(&mut parent, a);
        let e = by_root.entry(r).or_insert(Group { tree: g.infoset(h).tree, decisions: vec![], terminals: vec![] });
        if g.infoset(h).terminal {
            e.terminals.push(h);
        } else {
            e.decisions.push(h);
        }
    }
    by_root.into_values().collect()
}

/// Pure replacements of the owner's behavior at h and its ⇝-successors.
fn deviations(ctx: &PlayerContext, own: &Behavior, h: InfosetIdx) -> Vec<Behavior> {
    let sp = ctx.g.space();
    let mut slots: Vec<usize> = std::iter::once(h)
        .chain(ctx.succ[&h].iter().copied())
        .filter(|x| !ctx.g.infoset(*x).terminal)
        .filter_map(|x| sp.slot_of_infoset(x))
        .collect();
    slots.sort_unstable();
    slots.dedup();
    let mut out = vec![own.clone()];
    for k in slots {
        let n = sp.slots(ctx.owner)[k].actions.len();
        out = out
            .into_iter()
            .flat_map(|b| {
                (0..n).map(move |a| {
                    let mut v = b.clone();
                    v[k] = (0..n).map(|x| if x == a { one() } else { zero() }).collect();
                    v
                })
            })
            .collect();
    }
    out
}

/// Beliefs for one group: a distribution over local profiles, or `None` when no belief makes
/// the owner rational at every decision set of the group. The error names the first failing set.
fn solve_group(
    ctx: &PlayerContext,
    pi: &Profile,
    grp: &Group,
) -> std::result::Result<Vec<(usize, Q)>, InfosetIdx> {
    let g = ctx.g;
    let i = ctx.owner;
    let lp = &ctx.locals[&grp.tree];
    let own = &pi.behaviors[i];
    // Weight of the agreed part of each profile, and the key of its free part.
    let agree: BTreeSet<(Player, usize)> =
        if grp.terminals.is_empty() { BTreeSet::new() } else { agreement_slots(g, pi, grp.tree, i) };
    let sp = g.space();
    let mut cols: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut col_of = vec![usize::MAX; lp.len()];
    let mut weight = vec![zero(); lp.len()];
    for p in 0..lp.len() {
        let mut w = one();
        let mut key = Vec::new();
        for (k, ((j, s), a)) in lp.slots.iter().zip(&lp.profiles[p]).enumerate() {
            if agree.contains(&(*j, *s)) {
                let pos = sp.slots(*j)[*s].actions.iter().position(|x| x == a).unwrap();
                w *= &pi.behaviors[*j][*s][pos];
            } else {
                key.push(k);
                key.push(*a);
            }
        }
        if w == zero() {
            continue;
        }
        if grp.terminals.is_empty() {
            let h = grp.decisions[0];
            if !g.infoset(h).members.iter().any(|m| lp.reaches_node(p, *m)) {
                continue;
            }
        }
        let n = cols.len();
        col_of[p] = *cols.entry(key).or_insert(n);
        weight[p] = w;
    }
    let ncols = cols.len();
    let mut rows: Vec<(InfosetIdx, Vec<Q>)> = Vec::new();
    for &h in &grp.decisions {
        let devs = deviations(ctx, own, h);
        let members = &g.infoset(h).members;
        let mut base = vec![zero(); lp.len()];
        let mut starts = vec![None; lp.len()];
        for p in 0..lp.len() {
            if col_of[p] == usize::MAX {
                continue;
            }
            if let Some(m) = members.iter().copied().find(|m| lp.reaches_node(p, *m)) {
                let pure = completion(g, lp, p);
                let moves = Moves::pure(&pure).with(i, PlayerMoves::Behavior(own));
                base[p] = expected_from(g, &moves, m, i);
                starts[p] = Some((m, pure));
            }
        }
        for d in devs {
            let mut row = vec![zero(); ncols];
            for p in 0..lp.len() {
                if let Some((m, pure)) = &starts[p] {
                    let moves = Moves::pure(pure).with(i, PlayerMoves::Behavior(&d));
                    let diff = &base[p] - expected_from(g, &moves, *m, i);
                    row[col_of[p]] += &weight[p] * diff;
                }
            }
            if row.iter().any(|x| *x < zero()) {
                rows.push((h, row));
            }
        }
    }
    let build = |upto: usize| {
        let mut prog = Lp::new(ncols);
        prog.add((0..ncols).map(|c| (c, one())).collect(), Cmp::Eq, one());
        for (_, row) in rows.iter().take(upto) {
            prog.add(row.iter().cloned().enumerate().collect(), Cmp::Ge, zero());
        }
        prog
    };
    match build(rows.len()).solve() {
        Some(x) => {
            let mut out = Vec::new();
            for p in 0..lp.len() {
                if col_of[p] != usize::MAX {
                    let w = &weight[p] * &x[col_of[p]];
                    if w != zero() {
                        out.push((p, w));
                    }
                }
            }
            Ok(out)
        }
        None => {
            // First decision set whose rows, added in order, make the system infeasible.
            let mut upto = 0;
            while build(upto + 1).solve().is_some() {
                upto += 1;
            }
            Err(rows.get(upto).map(|r| r.0).unwrap_or(grp.decisions[0]))
        }
    }
}

pub fn check_player(g: &Game, pi: &Profile, i: Player) -> Result<PlayerReport> {
    let ctx = PlayerContext::new(g, i)?;
    let visited: Vec<InfosetIdx> = visited_infosets(g, &pi.moves(), TOP, i).into_iter().collect();
    let labels = visited.iter().map(|h| g.infoset_key(*h)).collect();
    let trees: BTreeSet<TreeIdx> = visited.iter().map(|h| g.infoset(*h).tree).collect();
    let condition0 = if trees.len() <= 1 {
        Condition0 { holds: true, tree: trees.first().map(|t| g.trees[*t].name.clone()), pair: None }
    } else {
        let mut along = visited.clone();
        along.sort_by_key(|h| (g.depth(g.infoset(*h).members[0]), *h));
        let a = along[0];
        let b = *along.iter().find(|h| g.infoset(**h).tree != g.infoset(a).tree).unwrap();
        Condition0 { holds: false, tree: None, pair: Some((g.infoset_key(a), g.infoset_key(b))) }
    };
    let mut beliefs = BTreeMap::new();
    let mut condition_i = Clause { holds: true, at: None };
    for grp in groups(g, &visited) {
        match solve_group(&ctx, pi, &grp) {
            Ok(b) => {
                for h in grp.decisions.iter().chain(&grp.terminals) {
                    beliefs.insert(*h, b.clone());
                }
            }
            Err(h) => {
                if condition_i.holds {
                    condition_i = Clause { holds: false, at: Some(g.infoset_key(h)) };
                }
            }
        }
    }
    // Terminal-belief pinning and constancy are built into every group, so the clause holds.
    let condition_ii = Clause { holds: true, at: None };
    let beliefs = condition_i.holds.then_some(BeliefSystem { owner: i, beliefs });
    Ok(PlayerReport { player: i, visited: labels, condition0, condition_i, condition_ii, beliefs })
}

pub fn check_sce(g: &Game, pi: &Profile) -> Result<SceReport> {
    require_total(g, pi)?;
    let players: Vec<Player> = g.players().collect();
    let reports = exec::map(&players, |&i| check_player(g, pi, i)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SceReport { verdict: reports.iter().all(|r| r.holds()), players: reports })
}

#[derive(Clone, Debug)]
pub struct RsceCertificate {
    /// Per player, a mixture over rationalizable strategies equivalent to the behavior.
    pub mixtures: Vec<Mixed>,
}

#[derive(Clone, Debug)]
pub struct RsceReport {
    pub sce: SceReport,
    /// First player without an equivalent mixture over R_i^∞.
    pub unsupported: Option<Player>,
    pub certificate: Option<RsceCertificate>,
}

impl RsceReport {
    pub fn verdict(&self) -> bool {
        self.sce.verdict && self.certificate.is_some()
    }

    pub fn to_json(&self, g: &Game) -> Result<Value> {
        let cert = self.certificate.as_ref().map(|c| {
            let m: serde_json::Map<String, Value> = g
                .players()
                .map(|i| {
                    let list: Vec<Value> = c.mixtures[i]
                        .iter()
                        .map(|(s, w)| {
                            let choices: serde_json::Map<String, Value> = crate::strategy::describe(g, i, s)
                                .into_iter()
                                .map(|(l, a)| (l, Value::String(a)))
                                .collect();
                            json!({"choices": choices, "weight": fmt_q(w)})
                        })
                        .collect();
                    (i.to_string(), Value::Array(list))
                })
                .collect();
            Value::Object(m)
        });
        Ok(json!({
            "schema": "ugt.rsce/1",
            "game": g.name,
            "verdict": self.verdict(),
            "sce": self.sce.to_json(g)?,
            "unsupported_player": self.unsupported,
            "certificate": cert,
        }))
    }
}

/// A mixture over `support` whose reach probabilities match `own` at every node.
pub fn equivalent_mixture(g: &Game, i: Player, own: &Behavior, support: &[&PureStrategy]) -> Option<Mixed> {
    let free = Moves::free(g);
    let target = free.clone().with(i, PlayerMoves::Behavior(own));
    let mut prog = Lp::new(support.len());
    prog.add((0..support.len()).map(|c| (c, one())).collect(), Cmp::Eq, one());
    let mut seen = BTreeSet::new();
    for n in 0..g.num_nodes() {
        let coeffs: Vec<bool> =
            support.iter().map(|s| reach_prob(g, &free.clone().with(i, PlayerMoves::Pure(s)), n) != zero()).collect();
        let rhs = reach_prob(g, &target, n);
        if !seen.insert((coeffs.clone(), rhs.clone())) {
            continue;
        }
        let row = coeffs.iter().enumerate().filter(|(_, b)| **b).map(|(c, _)| (c, one())).collect();
        prog.add(row, Cmp::Eq, rhs);
    }
    let x = prog.solve()?;
    Some(support.iter().zip(x).filter(|(_, w)| *w != zero()).map(|(s, w)| ((*s).clone(), w)).collect())
}

pub fn check_rsce(g: &Game, pi: &Profile, efr: &EfrResult) -> Result<RsceReport> {
    let sce = check_sce(g, pi)?;
    let mut mixtures = vec![Vec::new()];
    let mut unsupported = None;
    for i in g.players() {
        match equivalent_mixture(g, i, &pi.behaviors[i], &efr.rationalizable(i)) {
            Some(m) => mixtures.push(m),
            None => {
                unsupported = Some(i);
                break;
            }
        }
    }
    let certificate = unsupported.is_none().then_some(RsceCertificate { mixtures });
    Ok(RsceReport { sce, unsupported, certificate })
}

pub const DEFAULT_DENOMINATOR: u32 = 8;

/// Bounds of the equilibrium search.
#[derive(Clone, Debug)]
pub struct RsceSearch {
    pub max_den: u32,
    /// Mixtures tried per player.
    pub per_player: usize,
    /// Profiles checked in total.
    pub max_candidates: usize,
}

impl Default for RsceSearch {
    fn default() -> Self {
        RsceSearch { max_den: DEFAULT_DENOMINATOR, per_player: 4_000, max_candidates: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<Profile>,
    pub examined: usize,
    /// Every candidate within the denominator bound was checked.
    pub complete: bool,
}

fn nature_behavior(g: &Game) -> Result<Behavior> {
    if g.space().slots(NATURE).is_empty() {
        return Ok(vec![]);
    }
    chance_behavior(g).ok_or(Error::MissingNature)
}

/// Calls `f` on the k-subsets of 0..n in lexicographic order until it returns false.
fn subsets(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for x in start..n {
            cur.push(x);
            let more = go(x + 1, n, k, cur, f);
            cur.pop();
            if !more {
                return false;
            }
        }
        true
    }
    go(0, n, k, &mut Vec::new(), f)
}

/// Compositions of `d` into `parts` positive integers.
fn positive_compositions(d: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in 1..d {
        for mut rest in positive_compositions(d - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Behaviors of `i`: pure rationalizable ones, then mixtures by support size and denominator.
fn candidate_behaviors(g: &Game, i: Player, efr: &EfrResult, opts: &RsceSearch) -> Result<(Vec<Behavior>, bool)> {
    let support = efr.rationalizable(i);
    let mut out: Vec<Behavior> = Vec::new();
    let mut seen = BTreeSet::new();
    for s in &support {
        let b = crate::strategy::behavior_of_pure(g, i, s);
        if seen.insert(b.clone()) {
            out.push(b);
        }
    }
    if support.len() > 1 {
        // Checks perfect recall once for the whole search.
        behavioral_of_mixed(g, i, &[(support[0].clone(), one())])?;
    }
    let mut complete = true;
    let mut tried = 0usize;
    'outer: for k in 2..=support.len().min(opts.max_den as usize) {
        for d in k as u32..=opts.max_den {
            let comps = positive_compositions(d, k);
            let more = subsets(support.len(), k, &mut |idx| {
                for c in &comps {
                    if tried >= opts.per_player {
                        complete = false;
                        return false;
                    }
                    tried += 1;
                    let sigma: Mixed =
                        idx.iter().zip(c).map(|(x, w)| (support[*x].clone(), Q::new((*w).into(), d.into()))).collect();
                    let b = crate::strategy::kuhn(g, i, &sigma);
                    if seen.insert(b.clone()) {
                        out.push(b);
                    }
                }
                true
            });
            if !more {
                break 'outer;
            }
        }
    }
    Ok((out, complete))
}

/// Index tuples in order of their largest coordinate, then lexicographically.
fn diagonal(lens: &[usize], budget: usize) -> (Vec<Vec<usize>>, bool) {
    let mut out = Vec::new();
    let top = lens.iter().copied().max().unwrap_or(0);
    for m in 0..top {
        let mut cur = vec![0; lens.len()];
        fn go(k: usize, m: usize, hit: bool, lens: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, budget: usize) -> bool {
            if k == lens.len() {
                if hit {
                    if out.len() >= budget {
                        return false;
                    }
                    out.push(cur.clone());
                }
                return true;
            }
            for x in 0..lens[k].min(m + 1) {
                cur[k] = x;
                if !go(k + 1, m, hit || x == m, lens, cur, out, budget) {
                    return false;
                }
            }
            true
        }
        if !go(0, m, false, lens, &mut cur, &mut out, budget) {
            return (out, false);
        }
    }
    (out, true)
}

/// First profile passing `check_rsce`: pure rationalizable profiles in lexicographic order,
/// then mixtures over rationalizable supports with denominators up to `max_den`.
pub fn find_rsce(g: &Game, efr: &EfrResult, max_den: u32) -> Result<Option<Profile>> {
    Ok(search_rsce(g, efr, &RsceSearch { max_den, ..RsceSearch::default() })?.found)
}

pub fn search_rsce(g: &Game, efr: &EfrResult, opts: &RsceSearch) -> Result<SearchOutcome> {
    let nature = nature_behavior(g)?;
    let players: Vec<Player> = g.players().collect();
    // Candidates mix rationalizable strategies, so the self-confirming test decides; the
    // winner is certified in full below.
    let passes = |p: &Profile| players.iter().all(|i| check_player(g, p, *i).map(|r| r.holds()).unwrap_or(false));
    if players.iter().any(|i| efr.rationalizable(*i).is_empty()) {
        return Ok(SearchOutcome { found: None, examined: 0, complete: true });
    }
    let build = |lists: &[Vec<Behavior>], idx: &[usize]| Profile {
        behaviors: std::iter::once(nature.clone()).chain(idx.iter().zip(lists).map(|(k, l)| l[*k].clone())).collect(),
    };
    let mut lists = Vec::new();
    let mut complete = true;
    for &i in &players {
        let (l, c) = candidate_behaviors(g, i, efr, opts)?;
        complete &= c;
        lists.push(l);
    }
    let pure_lens: Vec<usize> = players.iter().map(|i| efr.rationalizable(*i).len()).collect();
    let lens: Vec<usize> = lists.iter().map(|l| l.len()).collect();
    let (order, fits) = diagonal(&lens, opts.max_candidates);
    complete &= fits;
    // Pure profiles first, each stage in its own order.
    let (mut pure, rest): (Vec<_>, Vec<_>) =
        order.into_iter().partition(|idx| idx.iter().zip(&pure_lens).all(|(k, n)| k < n));
    pure.sort();
    let mut examined = 0;
    for stage in [pure, rest] {
        for chunk in stage.chunks(256) {
            let cands: Vec<Profile> = chunk.iter().map(|idx| build(&lists, idx)).collect();
            let mut from = 0;
            while let Some(k) = exec::find_first(&cands[from..], passes) {
                let p = &cands[from + k];
                if check_rsce(g, p, efr)?.verdict() {
                    return Ok(SearchOutcome { found: Some(p.clone()), examined: examined + from + k + 1, complete });
                }
                from += k + 1;
            }
            examined += cands.len();
        }
    }
    Ok(SearchOutcome { found: None, examined, complete })
}
