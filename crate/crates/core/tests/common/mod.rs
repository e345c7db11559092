#![allow(dead_code)]

use std::path::PathBuf;

use ugt_core::{parse, Game};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> Game {
    parse(&fixture_text(name)).unwrap()
}

pub fn node(g: &Game, label: &str) -> usize {
    g.node_by_label(label).unwrap_or_else(|| panic!("no node {label}"))
}

pub fn tree(g: &Game, name: &str) -> usize {
    g.tree_by_name(name).unwrap()
}

pub const GAME_FIXTURES: &[&str] = &["ex1.ugt", "ex1_discovered.ugt", "std1.ugt", "pennies.ugt", "diamond.ugt"];

use ugt_core::belief::{BeliefSystem, Constraints, PlayerContext};
use ugt_core::rational::zero;
use ugt_core::Q;

/// Point beliefs and uniform mixtures over up to three profiles of `allowed`.
pub fn belief_vertices(allowed: &[bool]) -> Vec<Vec<(usize, Q)>> {
    let idx: Vec<usize> = (0..allowed.len()).filter(|p| allowed[*p]).collect();
    let mut out = Vec::new();
    let n = idx.len();
    for a in 0..n {
        out.push(vec![(idx[a], Q::from_integer(1.into()))]);
    }
    for a in 0..n {
        for b in a + 1..n {
            out.push(vec![(idx[a], Q::new(1.into(), 2.into())), (idx[b], Q::new(1.into(), 2.into()))]);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let w = Q::new(1.into(), 3.into());
                out.push(vec![(idx[a], w.clone()), (idx[b], w.clone()), (idx[c], w)]);
            }
        }
    }
    out
}

/// Every belief over `allowed` whose weights are multiples of 1/den.
pub fn belief_grid(allowed: &[bool], den: i64) -> Vec<Vec<(usize, Q)>> {
    let idx: Vec<usize> = (0..allowed.len()).filter(|p| allowed[*p]).collect();
    fn go(idx: &[usize], left: i64, den: i64, acc: &mut Vec<(usize, Q)>, out: &mut Vec<Vec<(usize, Q)>>) {
        match idx {
            [] => {}
            [last] => {
                if left > 0 {
                    acc.push((*last, Q::new(left.into(), den.into())));
                }
                out.push(acc.clone());
                if left > 0 {
                    acc.pop();
                }
            }
            [first, rest @ ..] => {
                for k in 0..=left {
                    if k > 0 {
                        acc.push((*first, Q::new(k.into(), den.into())));
                    }
                    go(rest, left - k, den, acc, out);
                    if k > 0 {
                        acc.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(&idx, den, den, &mut Vec::new(), &mut out);
    out.retain(|b| !b.is_empty());
    out
}

/// Brute-force witness search over belief vertices, with Bayes propagation along ⇝.
pub fn grid_witness(ctx: &PlayerContext, s: &[usize], c: &Constraints) -> Option<BeliefSystem> {
    search_witness(ctx, s, c, &belief_vertices)
}

/// Brute-force witness search over the 1/den grid.
pub fn fine_grid_witness(ctx: &PlayerContext, s: &[usize], c: &Constraints, den: i64) -> Option<BeliefSystem> {
    search_witness(ctx, s, c, &|allowed: &[bool]| belief_grid(allowed, den))
}

type Candidates<'a> = &'a dyn Fn(&[bool]) -> Vec<Vec<(usize, Q)>>;

fn search_witness(ctx: &PlayerContext, s: &[usize], c: &Constraints, cands: Candidates) -> Option<BeliefSystem> {
    fn go(ctx: &PlayerContext, s: &[usize], c: &Constraints, cands: Candidates, k: usize, acc: &mut BeliefSystem) -> bool {
        let Some(&h) = ctx.infosets.get(k) else { return ctx.audit(s, c, acc).is_ok() };
        let reach = &ctx.reach[&h];
        let derived = acc.beliefs.iter().find_map(|(h0, b)| {
            if !ctx.g.precedes(*h0, h) {
                return None;
            }
            let m: Q = b.iter().filter(|(p, _)| reach[*p]).map(|(_, w)| w.clone()).sum();
            (m != zero()).then(|| b.iter().filter(|(p, _)| reach[*p]).map(|(p, w)| (*p, w / &m)).collect::<Vec<_>>())
        });
        let candidates = match derived {
            Some(b) => vec![b],
            None => cands(&ctx.allowed_at(c, h)),
        };
        for b in candidates {
            if !ctx.is_rational_at(s, &b, h) {
                continue;
            }
            acc.beliefs.insert(h, b);
            if go(ctx, s, c, cands, k + 1, acc) {
                return true;
            }
            acc.beliefs.remove(&h);
        }
        false
    }
    let mut acc = BeliefSystem { owner: ctx.owner, beliefs: Default::default() };
    go(ctx, s, c, cands, 0, &mut acc).then_some(acc)
}

use ugt_core::profile::Profile;
use ugt_core::strategy::{enumerate_pure, payoff, PureStrategy};

/// Every pure profile, nature included.
pub fn pure_profiles(g: &Game) -> Vec<Vec<PureStrategy>> {
    profiles_from(g, enumerate_pure(g, 0, 1 << 16).unwrap().into_iter().map(|s| vec![s]).collect())
}

/// A pure profile chosen by `key`, nature included, without enumerating profiles.
pub fn keyed_profile(g: &Game, mut key: u64) -> Vec<PureStrategy> {
    let mut next = |n: usize| {
        key = key.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((key >> 33) as usize) % n
    };
    let nature: PureStrategy = g.space().slots(0).iter().map(|slot| slot.actions[next(slot.actions.len())]).collect();
    let mut out = vec![nature];
    for i in g.players() {
        let si = enumerate_pure(g, i, 1 << 16).unwrap();
        out.push(si[next(si.len())].clone());
    }
    out
}

/// Every pure profile of the players, nature slot left empty.
pub fn player_profiles(g: &Game) -> Vec<Vec<PureStrategy>> {
    profiles_from(g, vec![vec![vec![]]])
}

fn profiles_from(g: &Game, mut out: Vec<Vec<PureStrategy>>) -> Vec<Vec<PureStrategy>> {
    for i in g.players() {
        let si = enumerate_pure(g, i, 1 << 16).unwrap();
        out = out
            .into_iter()
            .flat_map(|p| {
                si.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s.clone());
                    q
                })
            })
            .collect();
    }
    out
}

/// Pure Nash equilibria of a single-tree game by unilateral-deviation scan, nature at chance.
pub fn pure_nash(g: &Game) -> Vec<Vec<PureStrategy>> {
    let top = 0;
    let u = |p: &[PureStrategy], i: usize| payoff(g, &Profile::from_pure(g, p).moves(), top, i).unwrap();
    player_profiles(g)
        .into_iter()
        .filter(|p| {
            g.players().all(|i| {
                let base = u(p, i);
                enumerate_pure(g, i, 1 << 16).unwrap().into_iter().all(|d| {
                    let mut q = p.clone();
                    q[i] = d;
                    u(&q, i) <= base
                })
            })
        })
        .collect()
}

/// Multiplies every payoff in a game text by `k`.
pub fn scale_payoffs(text: &str, k: &Q) -> String {
    text.lines()
        .map(|l| match l.find("payoffs ") {
            Some(at) => {
                let (head, tail) = l.split_at(at + "payoffs ".len());
                let vals: Vec<String> = tail
                    .split(',')
                    .map(|v| ugt_core::rational::fmt_q(&(ugt_core::rational::parse_q(v.trim()).unwrap() * k)))
                    .collect();
                format!("{head}{}", vals.join(","))
            }
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}
