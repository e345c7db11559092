//! Behavioral profiles and their JSON form.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Game, Player, NATURE};
use crate::rational::{fmt_q, one, parse_q, zero, Q};
use crate::strategy::{behavior_of_pure, chance_behavior, find_slot, slot_label, Behavior, Moves, PureStrategy};

/// One behavior per player, nature at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub behaviors: Vec<Behavior>,
}

impl Profile {
    pub fn from_pure(g: &Game, pure: &[PureStrategy]) -> Profile {
        let mut behaviors = Vec::with_capacity(pure.len());
        for (p, s) in pure.iter().enumerate() {
            if p == NATURE && g.space().slots(NATURE).len() != s.len() {
                behaviors.push(chance_behavior(g).unwrap_or_default());
            } else {
                behaviors.push(behavior_of_pure(g, p, s));
            }
        }
        Profile { behaviors }
    }

    pub fn moves(&self) -> Moves<'_> {
        Moves::behavior(&self.behaviors)
    }

    /// The pure strategy of `p`, if every slot is a point mass.
    pub fn pure_of(&self, g: &Game, p: Player) -> Option<PureStrategy> {
        g.space()
            .slots(p)
            .iter()
            .zip(&self.behaviors[p])
            .map(|(slot, d)| {
                let k = d.iter().position(|w| *w == one())?;
                Some(slot.actions[k])
            })
            .collect()
    }

    pub fn to_json(&self, g: &Game) -> Value {
        let mut players = serde_json::Map::new();
        for p in 0..=g.num_players {
            let slots = g.space().slots(p);
            if slots.is_empty() {
                continue;
            }
            let mut m = serde_json::Map::new();
            for (slot, d) in slots.iter().zip(&self.behaviors[p]) {
                let list: Vec<Value> = slot
                    .actions
                    .iter()
                    .zip(d)
                    .filter(|(_, w)| **w != zero())
                    .map(|(a, w)| json!([g.arena.action_name(*a), fmt_q(w)]))
                    .collect();
                m.insert(slot_label(g, slot), Value::Array(list));
            }
            players.insert(p.to_string(), Value::Object(m));
        }
        json!({"schema": "ugt.profile/1", "game": g.name, "players": players})
    }
}

fn weight(v: &Value) -> Option<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => n.as_i64().map(|i| Q::from_integer(i.into())),
        _ => None,
    }
}

pub fn parse_profile(g: &Game, text: &str) -> Result<Profile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Profile(format!("malformed JSON: {e}")))?;
    profile_from_json(g, &v)
}

pub fn profile_from_json(g: &Game, v: &Value) -> Result<Profile> {
    let bad = |m: String| Error::Profile(m);
    if v.get("schema").and_then(Value::as_str) != Some("ugt.profile/1") {
        return Err(bad("expected schema ugt.profile/1".into()));
    }
    let players = v.get("players").and_then(Value::as_object).ok_or_else(|| bad("missing players".into()))?;
    let mut behaviors: Vec<Option<Behavior>> = vec![None; g.num_players + 1];
    for (key, table) in players {
        let p: Player = key.parse().ok().filter(|p| *p <= g.num_players).ok_or_else(|| bad(format!("unknown player {key}")))?;
        let table = table.as_object().ok_or_else(|| bad(format!("player {key} needs an object")))?;
        let slots = g.space().slots(p);
        let mut out: Vec<Option<Vec<Q>>> = vec![None; slots.len()];
        for (label, list) in table {
            let k = find_slot(g, p, label)?;
            let mut d = vec![zero(); slots[k].actions.len()];
            let list = list.as_array().ok_or_else(|| bad(format!("{label} needs a list")))?;
            for pair in list {
                let pair = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(format!("{label}: entries are [action, weight]")))?;
                let name = pair[0].as_str().ok_or_else(|| bad(format!("{label}: action must be a string")))?;
                let w = weight(&pair[1]).filter(|w| *w >= zero()).ok_or_else(|| bad(format!("{label}: bad weight")))?;
                let a = g
                    .arena
                    .action_by_name(name)
                    .and_then(|a| slots[k].actions.iter().position(|x| *x == a))
                    .ok_or_else(|| bad(format!("action {name} not available at {label}")))?;
                d[a] += w;
            }
            if d.iter().sum::<Q>() != one() {
                return Err(bad(format!("weights at {label} do not sum to 1")));
            }
            out[k] = Some(d);
        }
        let full = out
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| bad(format!("player {p} has no entry for {}", slot_label(g, &slots[k])))))
            .collect::<Result<Behavior>>()?;
        behaviors[p] = Some(full);
    }
    if behaviors[NATURE].is_none() {
        behaviors[NATURE] = if g.space().slots(NATURE).is_empty() { Some(vec![]) } else { chance_behavior(g) };
        if behaviors[NATURE].is_none() {
            return Err(Error::MissingNature);
        }
    }
    let behaviors = behaviors
        .into_iter()
        .enumerate()
        .map(|(p, b)| b.ok_or_else(|| bad(format!("missing player {p}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile { behaviors })
}
