//! Extensive-form rationalizability: iterated elimination with belief-system witnesses.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::belief::{exists_rationalizing_belief_system, mask_from_sets, BeliefSystem, Constraints, PlayerContext};
use crate::error::Result;
use crate::exec;
use crate::model::{ActionId, Game, Player};
use crate::strategy::{describe, enumerate_pure, PureStrategy, DEFAULT_STRATEGY_CAP};

/// Surviving strategy indices per player (index 0, nature, stays empty).
pub type Round = Vec<Vec<usize>>;

/// Witnesses of one round: per player, strategy index to belief system.
pub type Witnesses = Vec<BTreeMap<usize, BeliefSystem>>;

#[derive(Clone, Debug)]
pub struct EfrOptions {
    pub strategy_cap: u128,
    pub profile_cap: u128,
}

impl Default for EfrOptions {
    fn default() -> Self {
        EfrOptions { strategy_cap: DEFAULT_STRATEGY_CAP, profile_cap: crate::belief::DEFAULT_PROFILE_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct EfrResult {
    /// Enumerated pure strategies per player.
    pub strategies: Vec<Vec<PureStrategy>>,
    /// rounds[k - 1] is R^k. The last round repeats the fixpoint.
    pub rounds: Vec<Round>,
    pub witnesses: Vec<Witnesses>,
    /// First k with R^{k+1} = R^k.
    pub fixpoint: usize,
}

impl EfrResult {
    pub fn survivors(&self, i: Player) -> &[usize] {
        &self.rounds.last().unwrap()[i]
    }

    pub fn rationalizable(&self, i: Player) -> Vec<&PureStrategy> {
        self.survivors(i).iter().map(|k| &self.strategies[i][*k]).collect()
    }

    pub fn is_rationalizable(&self, i: Player, s: &[ActionId]) -> bool {
        self.rationalizable(i).iter().any(|r| r.as_slice() == s)
    }

    pub fn witness(&self, i: Player, s: &[ActionId]) -> Option<&BeliefSystem> {
        let k = self.strategies[i].iter().position(|x| x.as_slice() == s)?;
        self.witnesses.last().unwrap()[i].get(&k)
    }

    pub fn to_json(&self, g: &Game) -> Result<Value> {
        let players: Vec<Player> = g.players().collect();
        let strat = |i: Player, k: usize| {
            let m: serde_json::Map<String, Value> =
                describe(g, i, &self.strategies[i][k]).into_iter().map(|(l, a)| (l, Value::String(a))).collect();
            json!({"id": k, "choices": m})
        };
        let rounds: Vec<Value> = self
            .rounds
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let per: serde_json::Map<String, Value> =
                    players.iter().map(|&i| (i.to_string(), json!(r[i]))).collect();
                json!({"k": k + 1, "survivors": per})
            })
            .collect();
        let mut out = serde_json::Map::new();
        for &i in &players {
            let ctx = PlayerContext::new(g, i)?;
            let list: Vec<Value> = self
                .survivors(i)
                .iter()
                .map(|&k| {
                    let mut v = strat(i, k);
                    if let Some(w) = self.witnesses.last().unwrap()[i].get(&k) {
                        v["witness"] = ctx.belief_json(w);
                    }
                    v
                })
                .collect();
            out.insert(i.to_string(), Value::Array(list));
        }
        let all: serde_json::Map<String, Value> = players
            .iter()
            .map(|&i| (i.to_string(), Value::Array((0..self.strategies[i].len()).map(|k| strat(i, k)).collect())))
            .collect();
        Ok(json!({
            "schema": "ugt.efr/1",
            "game": g.name,
            "fixpoint": self.fixpoint,
            "strategies": all,
            "rounds": rounds,
            "rationalizable": out,
        }))
    }
}

/// Per-player tables shared across rounds.
pub struct Solver<'g> {
    pub g: &'g Game,
    pub strategies: Vec<Vec<PureStrategy>>,
    ctxs: Vec<Option<PlayerContext<'g>>>,
}

impl<'g> Solver<'g> {
    pub fn new(g: &'g Game, opts: &EfrOptions) -> Result<Solver<'g>> {
        let mut strategies = vec![Vec::new()];
        let mut ctxs = vec![None];
        for i in g.players() {
            strategies.push(enumerate_pure(g, i, opts.strategy_cap)?);
            ctxs.push(Some(PlayerContext::with_cap(g, i, opts.profile_cap)?));
        }
        Ok(Solver { g, strategies, ctxs })
    }

    pub fn context(&self, i: Player) -> &PlayerContext<'g> {
        self.ctxs[i].as_ref().unwrap()
    }

    pub fn full_round(&self) -> Round {
        self.strategies.iter().enumerate().map(|(i, s)| if i == 0 { vec![] } else { (0..s.len()).collect() }).collect()
    }

    /// Support constraints of B_i^k given R^1..R^{k-1}.
    pub fn constraints(&self, i: Player, history: &[Round]) -> Constraints {
        let ctx = self.context(i);
        let mut c = Constraints::none();
        for r in history {
            let sets: Vec<Vec<PureStrategy>> = r
                .iter()
                .enumerate()
                .map(|(j, ks)| ks.iter().map(|k| self.strategies[j][*k].clone()).collect())
                .collect();
            let refs: Vec<Option<&[PureStrategy]>> =
                sets.iter().enumerate().map(|(j, s)| if j == 0 || j == i { None } else { Some(s.as_slice()) }).collect();
            for &h in &ctx.infosets {
                let mask = mask_from_sets(ctx, h, &refs);
                let reach = &ctx.reach[&h];
                if !mask.iter().zip(reach).any(|(a, b)| *a && *b) {
                    continue;
                }
                match c.allowed.get_mut(&h) {
                    Some(cur) => cur.iter_mut().zip(&mask).for_each(|(x, y)| *x = *x && *y),
                    None => {
                        c.allowed.insert(h, mask);
                    }
                }
            }
        }
        c
    }

    /// R^k from the earlier rounds R^1..R^{k-1}, reusing prior witnesses that still audit.
    pub fn step(&self, history: &[Round], prior: Option<&Witnesses>) -> (Round, Witnesses) {
        let mut round = vec![Vec::new()];
        let mut wits = vec![BTreeMap::new()];
        for i in self.g.players() {
            let ctx = self.context(i);
            let c = self.constraints(i, history);
            let cands: Vec<usize> = (0..self.strategies[i].len()).collect();
            let found = exec::map(&cands, |&k| {
                let s = &self.strategies[i][k];
                if let Some(w) = prior.and_then(|p| p[i].get(&k)) {
                    if ctx.audit(s, &c, w).is_ok() {
                        return Some(w.clone());
                    }
                }
                exists_rationalizing_belief_system(ctx, s, &c)
            });
            let mut keep = Vec::new();
            let mut map = BTreeMap::new();
            for (k, w) in cands.into_iter().zip(found) {
                if let Some(w) = w {
                    keep.push(k);
                    map.insert(k, w);
                }
            }
            round.push(keep);
            wits.push(map);
        }
        (round, wits)
    }

    pub fn run(&self) -> EfrResult {
        let bound: usize = self.strategies.iter().map(|s| s.len()).sum::<usize>() + 1;
        let mut rounds: Vec<Round> = Vec::new();
        let mut witnesses: Vec<Witnesses> = Vec::new();
        loop {
            let (r, w) = self.step(&rounds, witnesses.last());
            let done = rounds.last() == Some(&r);
            rounds.push(r);
            witnesses.push(w);
            assert!(rounds.len() <= bound, "rationalizability did not settle within {bound} rounds");
            if done {
                let fixpoint = rounds.len() - 1;
                return EfrResult { strategies: self.strategies.clone(), rounds, witnesses, fixpoint };
            }
        }
    }
}

pub fn efr(g: &Game) -> Result<EfrResult> {
    efr_with(g, &EfrOptions::default())
}

pub fn efr_with(g: &Game, opts: &EfrOptions) -> Result<EfrResult> {
    Ok(Solver::new(g, opts)?.run())
}
