//! Discovered versions, awareness comparisons and discovery processes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::efr::{efr_with, EfrOptions, EfrResult};
use crate::error::{Error, Result};
use crate::format::{game_hash, serialize};
use crate::model::{Game, NodeIdx, Player, TreeIdx, NATURE, TOP};
use crate::profile::Profile;
use crate::rational::{fmt_q, one, zero, Q};
use crate::sce::{search_rsce, RsceSearch};
use crate::strategy::{describe, visited_infosets, Mixed, Moves, PureStrategy};
use crate::validate::validate;

/// T^i: the join of the trees hosting the visited sets of `i` along the top-tree path.
pub fn awareness_tree(g: &Game, profile: &[PureStrategy], i: Player) -> Result<TreeIdx> {
    let visited = visited_infosets(g, &Moves::pure(profile), TOP, i);
    g.join_all(visited.iter().map(|h| g.infoset(*h).tree))
        .ok_or_else(|| Error::Structure(format!("player {i} has no visited information set to join")))
}

/// The game after playing `profile`: information sets lifted to each player's awareness.
pub fn discovered_version(g: &Game, profile: &[PureStrategy]) -> Result<Game> {
    let mut awareness = vec![TOP; g.num_players + 1];
    for i in g.players() {
        awareness[i] = awareness_tree(g, profile, i)?;
    }
    let old = g.assignment();
    let mut sets: BTreeMap<(Player, NodeIdx), Vec<NodeIdx>> = BTreeMap::new();
    for (&(i, x), members) in &old {
        let ti = awareness[i];
        let t2 = g.tree_of(x);
        let n = g.copy_in(x, TOP).expect("every node has a top-tree copy");
        let h = g.infoset_of(n, i).expect("active players have information sets at top copies");
        let t1 = g.infoset(h).tree;
        let same_in = |t: TreeIdx| -> Vec<NodeIdx> {
            g.tree_nodes(t).iter().copied().filter(|m| g.infoset_of(*m, i) == Some(h)).collect()
        };
        let new = if g.leq(t1, ti) && g.leq(ti, t2) {
            same_in(ti)
        } else if g.leq(t1, ti) && g.leq(t2, ti) {
            // Copies of the lifted set; equals the same-set nodes of T'' whenever T' ≼ T''.
            let mut v: Vec<NodeIdx> = same_in(ti).into_iter().filter_map(|m| g.copy_in(m, t2)).collect();
            v.sort_unstable();
            if g.leq(t1, t2) {
                assert_eq!(v, same_in(t2), "lift cases disagree below the awareness tree");
            }
            v
        } else {
            members.clone()
        };
        sets.insert((i, x), new);
    }
    g.with_infosets(&sets)
}

fn same_skeleton(g: &Game, g2: &Game) -> Result<()> {
    let ok = g.num_players == g2.num_players
        && g.nature == g2.nature
        && g.arena == g2.arena
        && g.trees.len() == g2.trees.len()
        && g.trees.iter().zip(&g2.trees).all(|(a, b)| a.name == b.name && a.members == b.members);
    if ok {
        Ok(())
    } else {
        Err(Error::SkeletonMismatch(format!("{} and {}", g.name, g2.name)))
    }
}

/// Weakly more awareness: every host tree in `g2` lies above the host in `g`.
pub fn more_awareness(g: &Game, g2: &Game) -> Result<bool> {
    same_skeleton(g, g2)?;
    for n in 0..g.num_nodes() {
        for (i, h) in g.active(n) {
            let Some(h2) = g2.infoset_of(n, *i) else { return Ok(false) };
            if !g.leq(g.infoset(*h).tree, g2.infoset(h2).tree) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Information preservation: old sets are exactly the copies of new sets, and equal old sets stay equal.
pub fn preserves_information(g: &Game, g2: &Game) -> Result<bool> {
    if !more_awareness(g, g2)? {
        return Err(Error::Precondition("the second game must have weakly more awareness".into()));
    }
    for n in 0..g.num_nodes() {
        for (i, h) in g.active(n) {
            let h2 = g2.infoset_of(n, *i).unwrap();
            let t = g.infoset(*h).tree;
            let copies: BTreeSet<NodeIdx> = g2.infoset(h2).members.iter().filter_map(|m| g.copy_in(*m, t)).collect();
            let old: BTreeSet<NodeIdx> = g.infoset(*h).members.iter().copied().collect();
            if copies != old {
                return Ok(false);
            }
        }
    }
    for t in 0..g.trees.len() {
        let nodes = g.tree_nodes(t);
        for (a, &n) in nodes.iter().enumerate() {
            for &m in &nodes[a + 1..] {
                for (i, h) in g.active(n) {
                    if g.infoset_of(m, *i) == Some(*h) && g2.infoset_of(n, *i) != g2.infoset_of(m, *i) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Discovery strategies of all players.
#[derive(Clone, Debug)]
pub enum Policy {
    /// First rationalizable strategy in enumeration order.
    EfrLexFirst,
    /// Last rationalizable strategy in enumeration order.
    EfrLexLast,
    /// Uniform over rationalizable strategies.
    EfrUniform,
    /// Per game hash, one mixture per player (index 0 unused); other games use the fallback.
    Table { entries: BTreeMap<String, Vec<Mixed>>, fallback: Box<Policy> },
}

impl Policy {
    pub fn parse(kind: &str) -> Option<Policy> {
        match kind {
            "efr-lex-first" => Some(Policy::EfrLexFirst),
            "efr-lex-last" => Some(Policy::EfrLexLast),
            "efr-uniform" => Some(Policy::EfrUniform),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::EfrLexFirst => "efr-lex-first",
            Policy::EfrLexLast => "efr-lex-last",
            Policy::EfrUniform => "efr-uniform",
            Policy::Table { .. } => "explicit-table",
        }
    }

    pub fn is_rationalizable(&self) -> bool {
        !matches!(self, Policy::Table { .. })
    }
}

/// Evaluates policies, caching rationalizability results per game state.
pub struct Driver {
    pub policy: Policy,
    pub opts: EfrOptions,
    cache: Mutex<HashMap<String, std::sync::Arc<EfrResult>>>,
}

impl Driver {
    pub fn new(policy: Policy) -> Driver {
        Driver::with_options(policy, EfrOptions::default())
    }

    pub fn with_options(policy: Policy, opts: EfrOptions) -> Driver {
        Driver { policy, opts, cache: Mutex::new(HashMap::new()) }
    }

    pub fn efr(&self, g: &Game) -> Result<std::sync::Arc<EfrResult>> {
        let key = game_hash(g);
        if let Some(r) = self.cache.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let r = std::sync::Arc::new(efr_with(g, &self.opts)?);
        self.cache.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    /// f(Γ): one mixture per player, nature at index 0 (its chance product).
    pub fn strategies(&self, g: &Game) -> Result<Vec<Mixed>> {
        let mut out = vec![nature_mixture(g)?];
        let table = match &self.policy {
            Policy::Table { entries, .. } => entries.get(&game_hash(g)),
            _ => None,
        };
        if let Some(t) = table {
            out.extend(t.iter().skip(1).cloned());
            return Ok(out);
        }
        let kind = match &self.policy {
            Policy::Table { fallback, .. } => fallback.as_ref(),
            p => p,
        };
        let r = self.efr(g)?;
        for i in g.players() {
            let support = r.rationalizable(i);
            let m: Mixed = match kind {
                Policy::EfrLexFirst | Policy::Table { .. } => vec![(support[0].clone(), one())],
                Policy::EfrLexLast => vec![(support[support.len() - 1].clone(), one())],
                Policy::EfrUniform => {
                    let w = Q::new(1.into(), (support.len() as i64).into());
                    support.iter().map(|s| ((*s).clone(), w.clone())).collect()
                }
            };
            out.push(m);
        }
        Ok(out)
    }
}

const NATURE_CAP: usize = 100_000;

/// Nature's pure strategies with their chance weights. Discovery only sees play in the
/// full tree, so chance nodes of lower trees are pinned to their first possible outcome.
fn nature_mixture(g: &Game) -> Result<Mixed> {
    let slots = g.space().slots(NATURE);
    if slots.is_empty() {
        return Ok(vec![(vec![], one())]);
    }
    let chance = crate::strategy::chance_behavior(g).ok_or(Error::MissingNature)?;
    let mut out: Mixed = vec![(vec![], one())];
    for (slot, dist) in slots.iter().zip(&chance) {
        let pinned = slot.node.map_or(false, |n| g.tree_of(n) != TOP);
        let first = dist.iter().position(|q| *q != zero());
        out = out
            .into_iter()
            .flat_map(|(s, w)| {
                slot.actions.iter().zip(dist).enumerate().filter(move |(k, (_, q))| {
                    **q != zero() && (!pinned || Some(*k) == first)
                }).map(move |(_, (a, q))| {
                    let mut v = s.clone();
                    v.push(*a);
                    let w = if pinned { w.clone() } else { &w * q };
                    (v, w)
                })
            })
            .collect();
        if out.len() > NATURE_CAP {
            return Err(Error::CapExceeded {
                what: "nature strategies".into(),
                size: out.len() as u128,
                cap: NATURE_CAP as u128,
            });
        }
    }
    Ok(out)
}

/// τ(· | Γ, f): successor games with probabilities, keyed by hash, in hash order.
pub fn transition(g: &Game, driver: &Driver) -> Result<Vec<(Game, Q)>> {
    let f = driver.strategies(g)?;
    let mut acc: BTreeMap<String, (Game, Q)> = BTreeMap::new();
    let mut profiles: Vec<(Vec<PureStrategy>, Q)> = vec![(vec![], one())];
    for m in &f {
        profiles = profiles
            .into_iter()
            .flat_map(|(p, w)| {
                m.iter().filter(|(_, q)| *q != zero()).map(move |(s, q)| {
                    let mut v = p.clone();
                    v.push(s.clone());
                    (v, &w * q)
                })
            })
            .collect();
    }
    for (p, w) in profiles {
        let g2 = discovered_version(g, &p)?;
        let e = acc.entry(game_hash(&g2)).or_insert_with(|| (g2, zero()));
        e.1 += w;
    }
    Ok(acc.into_values().collect())
}

pub fn is_self_confirming_game(g: &Game, driver: &Driver) -> Result<bool> {
    let t = transition(g, driver)?;
    Ok(t.len() == 1 && t[0].1 == one() && game_hash(&t[0].0) == game_hash(g))
}

/// Σ over (node, active player) of the tree height above the current host.
pub fn capacity_bound(g: &Game) -> usize {
    (0..g.num_nodes()).flat_map(|n| g.active(n).iter()).map(|(_, h)| g.height_above(g.infoset(*h).tree)).sum()
}

#[derive(Clone, Debug)]
pub struct Step {
    pub game_hash: String,
    pub profile: Vec<PureStrategy>,
    pub awareness: Vec<TreeIdx>,
    pub successor_hash: String,
    pub changed: bool,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub games: Vec<Game>,
    pub absorbing: bool,
}

impl Trace {
    pub fn last(&self) -> &Game {
        self.games.last().unwrap()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .zip(&self.games)
            .map(|(s, g)| {
                let profile: serde_json::Map<String, Value> = g
                    .players()
                    .map(|i| {
                        let m: serde_json::Map<String, Value> =
                            describe(g, i, &s.profile[i]).into_iter().map(|(l, a)| (l, Value::String(a))).collect();
                        (i.to_string(), Value::Object(m))
                    })
                    .collect();
                let awareness: serde_json::Map<String, Value> = g
                    .players()
                    .map(|i| (i.to_string(), Value::String(g.trees[s.awareness[i]].name.clone())))
                    .collect();
                json!({
                    "game": s.game_hash,
                    "profile": profile,
                    "awareness": awareness,
                    "successor": s.successor_hash,
                    "changed": s.changed,
                })
            })
            .collect();
        json!({
            "schema": "ugt.trace/1",
            "initial": game_hash(&self.games[0]),
            "final": game_hash(self.last()),
            "absorbing": self.absorbing,
            "steps": steps,
        })
    }
}

fn sample(rng: &mut ChaCha8Rng, m: &Mixed) -> PureStrategy {
    let support: Vec<&(PureStrategy, Q)> = m.iter().filter(|(_, w)| *w != zero()).collect();
    if support.len() == 1 {
        return support[0].0.clone();
    }
    let den = support.iter().fold(num_bigint::BigInt::from(1), |acc, (_, w)| {
        let d = w.denom();
        num_integer::Integer::lcm(&acc, d)
    });
    let den: u64 = den.try_into().expect("mixture denominators fit in 64 bits");
    let draw = rng.gen_range(0..den);
    let mut acc = 0u64;
    for (s, w) in &support {
        let k: u64 = (w * Q::from_integer(den.into())).to_integer().try_into().unwrap();
        acc += k;
        if draw < acc {
            return s.clone();
        }
    }
    support.last().unwrap().0.clone()
}

/// Plays the process from `initial` until an absorbing state or `max_steps` steps.
pub fn run(initial: &Game, driver: &Driver, seed: u64, max_steps: usize) -> Result<Trace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = capacity_bound(initial);
    let mut games = vec![initial.clone()];
    let mut steps = Vec::new();
    let mut changed = 0usize;
    loop {
        let g = games.last().unwrap();
        if is_self_confirming_game(g, driver)? {
            return Ok(Trace { steps, games, absorbing: true });
        }
        if steps.len() >= max_steps {
            return Err(Error::NotAbsorbed(max_steps));
        }
        let f = driver.strategies(g)?;
        let profile: Vec<PureStrategy> = f.iter().map(|m| sample(&mut rng, m)).collect();
        let mut awareness = vec![TOP];
        for i in g.players() {
            awareness.push(awareness_tree(g, &profile, i)?);
        }
        let next = discovered_version(g, &profile)?;
        let (h0, h1) = (game_hash(g), game_hash(&next));
        let moved = h0 != h1;
        if moved {
            changed += 1;
            assert!(changed <= bound, "awareness lifted more often than the capacity bound {bound}");
        }
        steps.push(Step { game_hash: h0, profile, awareness, successor_hash: h1, changed: moved });
        games.push(next);
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub trace: Trace,
    pub efr: std::sync::Arc<EfrResult>,
    pub equilibrium: Profile,
}

impl PipelineResult {
    pub fn to_json(&self) -> Result<Value> {
        let g = self.trace.last();
        Ok(json!({
            "schema": "ugt.pipeline/1",
            "trace": self.trace.to_json(),
            "game": serialize(g),
            "equilibrium": self.equilibrium.to_json(g),
        }))
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub seed: u64,
    pub max_steps: usize,
    pub search: RsceSearch,
    pub efr: EfrOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { seed: 0, max_steps: 64, search: RsceSearch::default(), efr: EfrOptions::default() }
    }
}

/// A rationalizable discovery process to its absorbing game, then an equilibrium there.
pub fn pipeline(initial: &Game, policy: Policy, opts: &PipelineOptions) -> Result<PipelineResult> {
    if !policy.is_rationalizable() {
        return Err(Error::Precondition("the pipeline needs a rationalizable policy".into()));
    }
    let report = validate(initial);
    if !report.ok {
        return Err(Error::Structure(format!("{} violation(s) of the game axioms", report.violations.len())));
    }
    let driver = Driver::with_options(policy, opts.efr.clone());
    let trace = run(initial, &driver, opts.seed, opts.max_steps)?;
    let last = trace.last();
    let efr = driver.efr(last)?;
    let equilibrium = search_rsce(last, &efr, &opts.search)?.found.ok_or(Error::NoRsce)?;
    Ok(PipelineResult { trace, efr, equilibrium })
}

/// A rationalizable point-policy path to a game that is absorbing and has an equilibrium.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Games from the initial one to the absorbing one, with the profile played at each.
    pub path: Vec<(Game, Vec<PureStrategy>)>,
    pub equilibrium: Profile,
}

/// Successor games of `g` when the players play `s` and nature follows chance.
fn successors(g: &Game, s: &[PureStrategy]) -> Result<BTreeMap<String, Game>> {
    let mut out = BTreeMap::new();
    for (nu, _) in nature_mixture(g)? {
        let mut p = s.to_vec();
        p[NATURE] = nu;
        let d = discovered_version(g, &p)?;
        out.insert(game_hash(&d), d);
    }
    Ok(out)
}

/// Breadth-first search over pure rationalizable point policies, up to `max_states` games.
pub fn rationalizable_search(initial: &Game, opts: &PipelineOptions, max_states: usize) -> Result<Option<Witness>> {
    let driver = Driver::with_options(Policy::EfrLexFirst, opts.efr.clone());
    let mut parent: HashMap<String, Option<(String, Vec<PureStrategy>)>> = HashMap::new();
    let mut games: HashMap<String, Game> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    let h0 = game_hash(initial);
    parent.insert(h0.clone(), None);
    games.insert(h0.clone(), initial.clone());
    queue.push_back(h0);
    while let Some(h) = queue.pop_front() {
        let g = games[&h].clone();
        let efr = driver.efr(&g)?;
        let mut profiles: Vec<Vec<PureStrategy>> = vec![vec![vec![]]];
        for i in g.players() {
            profiles = profiles
                .into_iter()
                .flat_map(|p| {
                    efr.rationalizable(i).into_iter().map(move |s| {
                        let mut q = p.clone();
                        q.push(s.clone());
                        q
                    })
                })
                .collect();
        }
        let mut tried_here = false;
        for s in profiles {
            let next = successors(&g, &s)?;
            if next.len() == 1 && next.contains_key(&h) {
                if tried_here {
                    continue;
                }
                tried_here = true;
                if let Some(eq) = search_rsce(&g, &efr, &opts.search)?.found {
                    let mut path = vec![(g.clone(), s)];
                    let mut cur = h.clone();
                    while let Some(Some((prev, p))) = parent.get(&cur) {
                        path.push((games[prev].clone(), p.clone()));
                        cur = prev.clone();
                    }
                    path.reverse();
                    return Ok(Some(Witness { path, equilibrium: eq }));
                }
                continue;
            }
            for (k, d) in next {
                if k != h && !parent.contains_key(&k) && parent.len() < max_states {
                    parent.insert(k.clone(), Some((h.clone(), s.clone())));
                    games.insert(k.clone(), d);
                    queue.push_back(k);
                }
            }
        }
    }
    Ok(None)
}

/// Weight of a mixture, formatted.
pub fn describe_mixture(g: &Game, i: Player, m: &Mixed) -> Vec<(Vec<(String, String)>, String)> {
    m.iter().map(|(s, w)| (describe(g, i, s), fmt_q(w))).collect()
}
