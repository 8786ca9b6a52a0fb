//! Arenas, games and the JSON game format.
//!
//! A game file looks like
//!
//! ```json
//! {
//!   "states": ["s0", "win", "lose"],
//!   "players": ["p1", "p2"],
//!   "actions": ["w", "s", "h", "r"],
//!   "allow": { "s0": { "p1": ["w", "s"], "p2": ["h", "r"] }, ... },
//!   "tab": { "s0": { "w,h": [["s0", "1"]], "s,r": [["win", "1"]], ... }, ... },
//!   "finals": ["win", "lose"],
//!   "rewards": { "win": { "p1": "1", "p2": "-1" }, ... }
//! }
//! ```
//!
//! Joint actions are comma-joined in player order. Every joint action allowed
//! at a state must have a row, final states included, and the declared finals
//! must be exactly the sink states.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Q};

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(StateId);
id_type!(PlayerId);
id_type!(ActionId);

/// A finite distribution with exact probabilities. Entries are sorted by key
/// and only positive probabilities are stored, so the support is the key set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution<K> {
    entries: Vec<(K, Q)>,
}

impl<K: Ord + Copy> Distribution<K> {
    pub fn dirac(k: K) -> Self {
        Distribution {
            entries: vec![(k, Q::one())],
        }
    }

    /// Merges duplicate keys and drops zero entries; fails unless the
    /// probabilities are non-negative and sum to exactly 1.
    pub fn new(entries: impl IntoIterator<Item = (K, Q)>) -> std::result::Result<Self, String> {
        let mut acc: BTreeMap<K, Q> = BTreeMap::new();
        for (k, p) in entries {
            if p.is_negative() {
                return Err(format!("negative probability {p}"));
            }
            *acc.entry(k).or_insert_with(Q::zero) += p;
        }
        let total: Q = acc.values().sum();
        if total != Q::one() {
            return Err(format!("distribution does not sum to 1 (sums to {total})"));
        }
        Ok(Self::from_sorted(acc))
    }

    fn from_sorted(acc: BTreeMap<K, Q>) -> Self {
        Distribution {
            entries: acc.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    /// Convex combination `sum_j w_j * d_j`. Weights are trusted to be a
    /// probability vector.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (Q, &'a Distribution<K>)>) -> Self
    where
        K: 'a,
    {
        let mut acc: BTreeMap<K, Q> = BTreeMap::new();
        for (w, d) in parts {
            if w.is_zero() {
                continue;
            }
            for (k, p) in &d.entries {
                *acc.entry(*k).or_insert_with(Q::zero) += &w * p;
            }
        }
        Self::from_sorted(acc)
    }

    pub fn prob(&self, k: K) -> Q {
        match self.entries.binary_search_by(|(x, _)| x.cmp(&k)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn entries(&self) -> &[(K, Q)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = K> + '_ {
        self.entries.iter().map(|(k, _)| *k)
    }

    pub fn contains(&self, k: K) -> bool {
        self.entries.binary_search_by(|(x, _)| x.cmp(&k)).is_ok()
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    pub fn map_keys<J: Ord + Copy>(&self, f: impl Fn(K) -> J) -> Distribution<J> {
        let mut acc: BTreeMap<J, Q> = BTreeMap::new();
        for (k, p) in &self.entries {
            *acc.entry(f(*k)).or_insert_with(Q::zero) += p;
        }
        Distribution::from_sorted(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    states: Vec<String>,
    players: Vec<String>,
    actions: Vec<String>,
    /// allow[state][player], sorted by action id
    allow: Vec<Vec<Vec<ActionId>>>,
    /// tab[state][joint index], joint index in mixed radix over allow lists,
    /// player 0 most significant
    tab: Vec<Vec<Distribution<StateId>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    arena: Arena,
    /// rewards[state] is `Some(per player)` exactly for final states
    rewards: Vec<Option<Vec<Q>>>,
}

impl Arena {
    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn players(&self) -> impl ExactSizeIterator<Item = PlayerId> {
        (0..self.players.len()).map(PlayerId)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn player_name(&self, i: PlayerId) -> &str {
        &self.players[i.0]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn player_id(&self, name: &str) -> Result<PlayerId> {
        self.players
            .iter()
            .position(|s| s == name)
            .map(PlayerId)
            .ok_or_else(|| Error::UnknownPlayer(name.to_string()))
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|s| s == name).map(ActionId)
    }

    pub fn allow(&self, s: StateId, i: PlayerId) -> &[ActionId] {
        &self.allow[s.0][i.0]
    }

    pub fn is_allowed(&self, s: StateId, i: PlayerId, a: ActionId) -> bool {
        self.allow[s.0][i.0].binary_search(&a).is_ok()
    }

    /// Position of `a` in `allow(s, i)`.
    pub fn action_pos(&self, s: StateId, i: PlayerId, a: ActionId) -> Option<usize> {
        self.allow[s.0][i.0].binary_search(&a).ok()
    }

    pub fn num_joint_actions(&self, s: StateId) -> usize {
        self.allow[s.0].iter().map(Vec::len).product()
    }

    fn joint_index(&self, s: StateId, joint: &[ActionId]) -> Option<usize> {
        if joint.len() != self.players.len() {
            return None;
        }
        let mut idx = 0;
        for (i, a) in joint.iter().enumerate() {
            let allowed = &self.allow[s.0][i];
            idx = idx * allowed.len() + allowed.binary_search(a).ok()?;
        }
        Some(idx)
    }

    /// The joint action with the given mixed-radix index.
    pub fn joint_action(&self, s: StateId, mut idx: usize) -> Vec<ActionId> {
        let allow = &self.allow[s.0];
        let mut out = vec![ActionId(0); allow.len()];
        for i in (0..allow.len()).rev() {
            out[i] = allow[i][idx % allow[i].len()];
            idx /= allow[i].len();
        }
        out
    }

    pub fn successors(&self, s: StateId, joint: &[ActionId]) -> Result<&Distribution<StateId>> {
        match self.joint_index(s, joint) {
            Some(idx) => Ok(&self.tab[s.0][idx]),
            None => {
                let (i, a) = joint
                    .iter()
                    .enumerate()
                    .find(|(i, a)| *i >= self.players.len() || !self.is_allowed(s, PlayerId(*i), **a))
                    .map(|(i, a)| (i, *a))
                    .unwrap_or((0, ActionId(0)));
                Err(Error::DisallowedAction {
                    state: self.state_name(s).to_string(),
                    player: self.players.get(i).cloned().unwrap_or_default(),
                    action: self.actions.get(a.0).cloned().unwrap_or_default(),
                })
            }
        }
    }

    /// All `(joint action, outcome)` rows at `s`, in index order.
    pub fn rows(&self, s: StateId) -> impl Iterator<Item = (Vec<ActionId>, &Distribution<StateId>)> {
        self.tab[s.0]
            .iter()
            .enumerate()
            .map(move |(idx, d)| (self.joint_action(s, idx), d))
    }

    /// Calls `f` for every joint action in the product of `supports`
    /// (indexed by player) together with its outcome.
    pub fn for_each_joint<F>(&self, s: StateId, supports: &[&[ActionId]], mut f: F)
    where
        F: FnMut(&[ActionId], &Distribution<StateId>),
    {
        let n = supports.len();
        if supports.iter().any(|sup| sup.is_empty()) {
            return;
        }
        let mut pos = vec![0usize; n];
        let mut joint: Vec<ActionId> = supports.iter().map(|sup| sup[0]).collect();
        loop {
            let idx = self.joint_index(s, &joint).expect("support outside allow set");
            f(&joint, &self.tab[s.0][idx]);
            let mut i = n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < supports[i].len() {
                    joint[i] = supports[i][pos[i]];
                    break;
                }
                pos[i] = 0;
                joint[i] = supports[i][0];
            }
        }
    }

    /// A state is a sink when every joint action loops back to it.
    pub fn is_sink(&self, s: StateId) -> bool {
        self.tab[s.0].iter().all(|d| d.entries().len() == 1 && d.entries()[0].0 == s)
    }

    /// Smallest positive transition probability in the arena.
    pub fn min_positive_probability(&self) -> Q {
        self.tab
            .iter()
            .flatten()
            .flat_map(|d| d.entries().iter().map(|(_, p)| p))
            .min()
            .cloned()
            .unwrap_or_else(Q::one)
    }
}

impl Game {
    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.rewards[s.0].is_some()
    }

    /// [`Game::is_final`] by state name.
    pub fn is_final_named(&self, name: &str) -> Result<bool> {
        Ok(self.is_final(self.arena.state_id(name)?))
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.arena.states().filter(|s| self.is_final(*s))
    }

    pub fn non_finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.arena.states().filter(|s| !self.is_final(*s))
    }

    /// `nu_i(f)`; `None` when `f` is not final.
    pub fn reward(&self, f: StateId, i: PlayerId) -> Option<&Q> {
        self.rewards[f.0].as_ref().map(|r| &r[i.0])
    }

    pub fn rewards(&self, f: StateId) -> Option<&[Q]> {
        self.rewards[f.0].as_deref()
    }

    pub fn successors(&self, s: StateId, joint: &[ActionId]) -> Result<&Distribution<StateId>> {
        self.arena.successors(s, joint)
    }

    /// Builds and validates a game from parts. `tab[s][k]` is indexed by the
    /// mixed-radix joint index over `allow[s]` (player 0 most significant);
    /// allow lists are sorted here.
    pub fn from_parts(
        states: Vec<String>,
        players: Vec<String>,
        actions: Vec<String>,
        mut allow: Vec<Vec<Vec<ActionId>>>,
        tab: Vec<Vec<Distribution<StateId>>>,
        rewards: Vec<Option<Vec<Q>>>,
    ) -> Result<Game> {
        let invalid = |m: String| Err(Error::Invalid(m));
        let n = states.len();
        if n == 0 {
            return invalid("no states".into());
        }
        if players.is_empty() {
            return invalid("no players".into());
        }
        for (what, names) in [("state", &states), ("player", &players), ("action", &actions)] {
            let mut seen = BTreeSet::new();
            for name in names.iter() {
                if !seen.insert(name) {
                    return invalid(format!("duplicate {what} {name:?}"));
                }
            }
        }
        if allow.len() != n || tab.len() != n || rewards.len() != n {
            return invalid("per-state tables have the wrong length".into());
        }
        for (s, per_player) in allow.iter_mut().enumerate() {
            if per_player.len() != players.len() {
                return invalid(format!("allow at {:?} lists the wrong number of players", states[s]));
            }
            for (i, acts) in per_player.iter_mut().enumerate() {
                acts.sort();
                acts.dedup();
                if acts.is_empty() {
                    return invalid(format!(
                        "player {:?} has no allowed action at {:?}",
                        players[i], states[s]
                    ));
                }
                if acts.iter().any(|a| a.0 >= actions.len()) {
                    return invalid("action id out of range".into());
                }
            }
        }
        for (s, row) in tab.iter().enumerate() {
            let expected: usize = allow[s].iter().map(Vec::len).product();
            if row.len() != expected {
                return invalid(format!("missing joint action at state {:?}", states[s]));
            }
            for d in row {
                if d.support().any(|t| t.0 >= n) {
                    return invalid("successor out of range".into());
                }
            }
        }
        let game = Game {
            arena: Arena {
                states,
                players,
                actions,
                allow,
                tab,
            },
            rewards,
        };
        for s in game.arena.states() {
            let sink = game.arena.is_sink(s);
            let name = game.arena.state_name(s);
            match &game.rewards[s.0] {
                Some(r) if !sink => {
                    return invalid(format!("final state {name:?} is not a sink"));
                }
                Some(r) if r.len() != game.arena.num_players() => {
                    return invalid(format!("rewards at {name:?} do not cover every player"));
                }
                None if sink => {
                    return invalid(format!("sink state {name:?} is not declared final"));
                }
                _ => {}
            }
        }
        Ok(game)
    }

    /// Same arena, different terminal rewards (indexed by state).
    pub fn with_rewards(&self, rewards: Vec<Option<Vec<Q>>>) -> Result<Game> {
        let a = &self.arena;
        Game::from_parts(
            a.states.clone(),
            a.players.clone(),
            a.actions.clone(),
            a.allow.clone(),
            a.tab.clone(),
            rewards,
        )
    }

    /// Turns the given non-final states into sinks with the given rewards.
    pub(crate) fn collapse_to_finals(&self, collapse: &BTreeMap<StateId, Vec<Q>>) -> Result<Game> {
        let a = &self.arena;
        let mut tab = a.tab.clone();
        let mut rewards = self.rewards.clone();
        for (s, r) in collapse {
            for d in tab[s.0].iter_mut() {
                *d = Distribution::dirac(*s);
            }
            rewards[s.0] = Some(r.clone());
        }
        Game::from_parts(
            a.states.clone(),
            a.players.clone(),
            a.actions.clone(),
            a.allow.clone(),
            tab,
            rewards,
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    states: Vec<String>,
    players: Vec<String>,
    actions: Vec<String>,
    allow: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    tab: BTreeMap<String, BTreeMap<String, Vec<(String, String)>>>,
    finals: Vec<String>,
    rewards: BTreeMap<String, BTreeMap<String, String>>,
}

pub fn parse_game(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build_game(file)
}

fn build_game(f: GameFile) -> Result<Game> {
    let invalid = |m: String| Error::Invalid(m);
    let index = |names: &[String]| -> HashMap<String, usize> {
        names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect()
    };
    let state_ix = index(&f.states);
    let player_ix = index(&f.players);
    let action_ix = index(&f.actions);
    let state_of = |name: &str| {
        state_ix
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    };
    let n = f.states.len();
    let np = f.players.len();

    for name in f.allow.keys().chain(f.tab.keys()).chain(f.rewards.keys()) {
        state_of(name)?;
    }

    let mut allow = vec![vec![Vec::new(); np]; n];
    for (s, sname) in f.states.iter().enumerate() {
        let per = f
            .allow
            .get(sname)
            .ok_or_else(|| invalid(format!("no allow entry for state {sname:?}")))?;
        for pname in per.keys() {
            if !player_ix.contains_key(pname) {
                return Err(Error::UnknownPlayer(pname.clone()));
            }
        }
        for (i, pname) in f.players.iter().enumerate() {
            let acts = per
                .get(pname)
                .ok_or_else(|| invalid(format!("no allowed actions for {pname:?} at {sname:?}")))?;
            for a in acts {
                let id = action_ix
                    .get(a)
                    .ok_or_else(|| invalid(format!("unknown action {a:?}")))?;
                allow[s][i].push(ActionId(*id));
            }
            allow[s][i].sort();
            if allow[s][i].windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("duplicate action for {pname:?} at {sname:?}")));
            }
        }
    }

    let mut tab = Vec::with_capacity(n);
    for (s, sname) in f.states.iter().enumerate() {
        let rows = f
            .tab
            .get(sname)
            .ok_or_else(|| invalid(format!("no transition table for state {sname:?}")))?;
        let expected: usize = allow[s].iter().map(Vec::len).product();
        let mut slots: Vec<Option<Distribution<StateId>>> = vec![None; expected];
        for (key, succ) in rows {
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != np {
                return Err(invalid(format!(
                    "joint action {key:?} at {sname:?} does not name one action per player"
                )));
            }
            let mut idx = 0;
            for (i, a) in parts.iter().enumerate() {
                let id = action_ix
                    .get(*a)
                    .ok_or_else(|| invalid(format!("unknown action {a:?} in {key:?}")))?;
                let pos = allow[s][i].binary_search(&ActionId(*id)).map_err(|_| Error::DisallowedAction {
                    state: sname.clone(),
                    player: f.players[i].clone(),
                    action: a.to_string(),
                })?;
                idx = idx * allow[s][i].len() + pos;
            }
            let mut entries = Vec::with_capacity(succ.len());
            for (t, p) in succ {
                entries.push((StateId(state_of(t)?), parse_rational(p)?));
            }
            let d = Distribution::new(entries)
                .map_err(|m| invalid(format!("{m} at {sname:?} under {key:?}")))?;
            if slots[idx].replace(d).is_some() {
                return Err(invalid(format!("duplicate joint action {key:?} at {sname:?}")));
            }
        }
        let mut row = Vec::with_capacity(expected);
        for (k, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(d) => row.push(d),
                None => {
                    let mut rem = k;
                    let mut names = vec![String::new(); np];
                    for i in (0..np).rev() {
                        let m = allow[s][i].len();
                        names[i] = f.actions[allow[s][i][rem % m].0].clone();
                        rem /= m;
                    }
                    return Err(invalid(format!(
                        "missing joint action {:?} at {sname:?}",
                        names.join(",")
                    )));
                }
            }
        }
        tab.push(row);
    }

    let mut rewards: Vec<Option<Vec<Q>>> = vec![None; n];
    for fname in &f.finals {
        let s = state_of(fname)?;
        if rewards[s].is_some() {
            return Err(invalid(format!("final state {fname:?} listed twice")));
        }
        let per = f
            .rewards
            .get(fname)
            .ok_or_else(|| invalid(format!("no rewards for final state {fname:?}")))?;
        let mut r = Vec::with_capacity(np);
        for pname in &f.players {
            let v = per
                .get(pname)
                .ok_or_else(|| invalid(format!("no reward for {pname:?} at {fname:?}")))?;
            r.push(parse_rational(v)?);
        }
        for pname in per.keys() {
            if !player_ix.contains_key(pname) {
                return Err(Error::UnknownPlayer(pname.clone()));
            }
        }
        rewards[s] = Some(r);
    }
    for sname in f.rewards.keys() {
        if rewards[state_of(sname)?].is_none() {
            return Err(invalid(format!("rewards given for non-final state {sname:?}")));
        }
    }

    Game::from_parts(f.states, f.players, f.actions, allow, tab, rewards)
}

/// Canonical JSON text of a game; `parse_game` of the output yields an
/// identical game.
pub fn serialize_game(game: &Game) -> String {
    serde_json::to_string_pretty(&game_to_json(game)).expect("json")
}

pub fn game_to_json(game: &Game) -> serde_json::Value {
    use serde_json::{json, Map, Value};
    let a = &game.arena;
    let mut allow = Map::new();
    let mut tab = Map::new();
    for s in a.states() {
        let mut per = Map::new();
        for i in a.players() {
            let acts: Vec<Value> = a.allow(s, i).iter().map(|x| json!(a.action_name(*x))).collect();
            per.insert(a.player_name(i).to_string(), Value::Array(acts));
        }
        allow.insert(a.state_name(s).to_string(), Value::Object(per));
        let mut rows = Map::new();
        for (joint, d) in a.rows(s) {
            let key: Vec<&str> = joint.iter().map(|x| a.action_name(*x)).collect();
            let succ: Vec<Value> = d
                .entries()
                .iter()
                .map(|(t, p)| json!([a.state_name(*t), format_rational(p)]))
                .collect();
            rows.insert(key.join(","), Value::Array(succ));
        }
        tab.insert(a.state_name(s).to_string(), Value::Object(rows));
    }
    let mut rewards = Map::new();
    for f in game.finals() {
        let mut per = Map::new();
        for i in a.players() {
            per.insert(
                a.player_name(i).to_string(),
                json!(format_rational(game.reward(f, i).unwrap())),
            );
        }
        rewards.insert(a.state_name(f).to_string(), Value::Object(per));
    }
    json!({
        "states": a.states,
        "players": a.players,
        "actions": a.actions,
        "allow": allow,
        "tab": tab,
        "finals": game.finals().map(|f| a.state_name(f)).collect::<Vec<_>>(),
        "rewards": rewards,
    })
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    const SINGLE: &str = r#"{
        "states": ["z"], "players": ["p"], "actions": ["x"],
        "allow": {"z": {"p": ["x"]}},
        "tab": {"z": {"x": [["z", "1"]]}},
        "finals": ["z"], "rewards": {"z": {"p": "0"}}
    }"#;

    #[test]
    fn single_sink_game() {
        let g = parse_game(SINGLE).unwrap();
        assert_eq!(g.finals().collect::<Vec<_>>(), vec![StateId(0)]);
        assert!(g.is_final_named("z").unwrap());
        assert!(g.is_final_named("nope").is_err());
    }

    #[test]
    fn bad_row_sum() {
        let text = SINGLE.replace(r#"[["z", "1"]]"#, r#"[["z", "9/10"]]"#);
        let err = parse_game(&text).unwrap_err().to_string();
        assert!(err.contains("distribution does not sum to 1"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_game("{\n  \"states\": [,]\n}") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_sink_rejected() {
        let text = SINGLE.replace(r#""finals": ["z"], "rewards": {"z": {"p": "0"}}"#, r#""finals": [], "rewards": {}"#);
        assert!(parse_game(&text).unwrap_err().to_string().contains("not declared final"));
    }

    #[test]
    fn distribution_mixture() {
        let a = Distribution::new([(StateId(0), q(1, 2)), (StateId(1), q(1, 2))]).unwrap();
        let b = Distribution::dirac(StateId(1));
        let m = Distribution::mixture([(q(1, 2), &a), (q(1, 2), &b)]);
        assert_eq!(m.prob(StateId(0)), q(1, 4));
        assert_eq!(m.prob(StateId(1)), q(3, 4));
        assert!(Distribution::new([(StateId(0), q(-1, 2)), (StateId(1), q(3, 2))]).is_err());
        let zeros = Distribution::new([(StateId(0), q(0, 1)), (StateId(1), q(1, 1))]).unwrap();
        assert_eq!(zeros, Distribution::dirac(StateId(1)));
    }
}
