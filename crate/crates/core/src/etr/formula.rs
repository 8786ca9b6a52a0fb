//! Support guesses and the per-guess real-arithmetic formula.
//!
//! For a guess the formula is the conjunction of:
//!
//! * strategies: `0 < p_i{i}_s{s}_a{a} <= 1` on the guessed support, summing
//!   to 1; actions off the support are the constant 0 and singleton supports
//!   the constant 1, so no variable is declared for them;
//! * payoffs: `u_i{i}_s{s} = 0` on states from which the support graph
//!   reaches no final state, otherwise the one-step expectation of the
//!   successors' payoffs (finals contribute their reward);
//! * deviation values, per player, over the node layout of [`Skeleton`]:
//!   `w = 0` on the spoil set, the nodes from which the perturber keeps play
//!   away from final states forever against the guessed deviator; at a state
//!   node, `w` equals the guessed interval node's value and dominates all
//!   four; at an interval node, `w` is the smaller endpoint expectation
//!   (`w <= e_lo`, `w <= e_hi`, `w = e_lo or w = e_hi`), or the guessed
//!   endpoint with `w <= ` the other one when perturber moves are guessed;
//! * stability: `w_i{i}_n{s0} <= u_i{i}_s{s0}`;
//! * bounds `lo <= u_i{i}_s{s0} <= hi` where given;
//! * with a constraint set, `eps <= p` for every constrained action (or
//!   `false` when the guess leaves it out of the support).
//!
//! With nonnegative rewards the deviation values pinned this way are the
//! least fixpoint of the game's optimality operator, hence the values of the
//! deviation game.

use std::collections::{BTreeMap, BTreeSet};

use num::traits::{One, Signed, Zero};
use serde_json::json;

use crate::deviation::interval_bounds;
use crate::error::{Error, Result};
use crate::model::{ActionId, Game, PlayerId, StateId};
use crate::rational::{format_rational, Q};
use crate::strategy::DeltaEpsilonSpec;

use super::term::{add, and, eq, le, lt, mul, num, or, var, Term};

pub const DEFAULT_GUESS_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PerturberMode {
    /// `w = min(e_lo, e_hi)` stated with a disjunction.
    #[default]
    Symbolic,
    /// One endpoint per interval node is part of the guess.
    Explicit,
}

/// Node layout of a player's deviation game: states first, then four
/// interval nodes for every non-final state where the player has two actions.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub player: PlayerId,
    pub num_states: usize,
    pub first_interval: Vec<Option<usize>>,
    pub num_nodes: usize,
    pub intervals: [(Q, Q); 4],
}

impl Skeleton {
    pub fn new(game: &Game, i: PlayerId, epsilon: &Q) -> Result<Self> {
        let ar = game.arena();
        let n = ar.num_states();
        let mut next = n;
        let mut first_interval = vec![None; n];
        for s in ar.states() {
            if game.is_final(s) {
                continue;
            }
            match ar.allow(s, i).len() {
                1 => {}
                2 => {
                    first_interval[s.0] = Some(next);
                    next += 4;
                }
                count => {
                    return Err(Error::TooManyActions {
                        player: ar.player_name(i).to_string(),
                        state: ar.state_name(s).to_string(),
                        count,
                        max: 2,
                    })
                }
            }
        }
        Ok(Skeleton {
            player: i,
            num_states: n,
            first_interval,
            num_nodes: next,
            intervals: interval_bounds(epsilon),
        })
    }

    /// `(state, interval index)` of an interval node.
    pub fn interval_of(&self, node: usize) -> Option<(StateId, usize)> {
        self.first_interval.iter().enumerate().find_map(|(s, f)| {
            f.filter(|f| (*f..*f + 4).contains(&node)).map(|f| (StateId(s), node - f))
        })
    }

    pub fn label(&self, game: &Game, node: usize) -> String {
        if node < self.num_states {
            return game.arena().state_name(StateId(node)).to_string();
        }
        let (s, k) = self.interval_of(node).expect("node in range");
        let (lo, hi) = &self.intervals[k];
        format!("{}[{},{}]", game.arena().state_name(s), format_rational(lo), format_rational(hi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGuess {
    /// `[player][state]`; finals carry their first allowed action.
    pub supports: Vec<Vec<Vec<ActionId>>>,
    /// `[player][state]` interval index at two-action non-final states, else 0.
    pub deviator: Vec<Vec<usize>>,
    /// `[player][interval node - num_states]` endpoint index (0 low, 1 high).
    pub perturber: Option<Vec<Vec<usize>>>,
}

impl SupportGuess {
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let ar = game.arena();
        let mut out = serde_json::Map::new();
        for i in ar.players() {
            let mut per = serde_json::Map::new();
            for s in game.non_finals() {
                let sup: Vec<&str> = self.supports[i.0][s.0].iter().map(|a| ar.action_name(*a)).collect();
                let mut entry = json!({ "support": sup });
                if ar.allow(s, i).len() == 2 {
                    entry["deviator_interval"] = json!(self.deviator[i.0][s.0]);
                }
                per.insert(ar.state_name(s).to_string(), entry);
            }
            if let Some(p) = &self.perturber {
                per.insert("perturber".into(), json!(p[i.0]));
            }
            out.insert(ar.player_name(i).to_string(), serde_json::Value::Object(per));
        }
        serde_json::Value::Object(out)
    }
}

fn nonempty_subsets(items: &[ActionId]) -> Vec<Vec<ActionId>> {
    (1u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect()
}

/// Lazily enumerated guesses in mixed-radix order: supports (player-major,
/// state order), then deviator intervals, then perturber endpoints.
pub struct GuessSpace {
    game: Game,
    skeletons: Vec<Skeleton>,
    support_slots: Vec<(PlayerId, StateId, Vec<Vec<ActionId>>)>,
    deviator_slots: Vec<(PlayerId, StateId)>,
    perturber_slots: Vec<(PlayerId, usize)>,
    mode: PerturberMode,
    counter: Vec<usize>,
    radices: Vec<usize>,
    index: u128,
    total: u128,
    done: bool,
}

impl GuessSpace {
    pub fn new(
        game: &Game,
        epsilon: &Q,
        spec: Option<&DeltaEpsilonSpec>,
        mode: PerturberMode,
        cap: u128,
    ) -> Result<Self> {
        let ar = game.arena();
        let skeletons = ar
            .players()
            .map(|i| Skeleton::new(game, i, epsilon))
            .collect::<Result<Vec<_>>>()?;
        let mut support_slots = Vec::new();
        for i in ar.players() {
            for s in game.non_finals() {
                let options: Vec<Vec<ActionId>> = nonempty_subsets(ar.allow(s, i))
                    .into_iter()
                    .filter(|sup| {
                        spec.is_none_or(|sp| {
                            ar.allow(s, i)
                                .iter()
                                .all(|a| sp.lower_bound(i, s, *a).is_zero() || sup.contains(a))
                        })
                    })
                    .collect();
                support_slots.push((i, s, options));
            }
        }
        let mut deviator_slots = Vec::new();
        let mut perturber_slots = Vec::new();
        for sk in &skeletons {
            for s in ar.states() {
                if sk.first_interval[s.0].is_some() {
                    deviator_slots.push((sk.player, s));
                }
            }
            if mode == PerturberMode::Explicit {
                for k in sk.num_states..sk.num_nodes {
                    perturber_slots.push((sk.player, k));
                }
            }
        }
        let radices: Vec<usize> = support_slots
            .iter()
            .map(|(_, _, o)| o.len())
            .chain(deviator_slots.iter().map(|_| 4))
            .chain(perturber_slots.iter().map(|_| 2))
            .collect();
        let total = radices
            .iter()
            .fold(1u128, |acc, r| acc.saturating_mul(*r as u128));
        if total > cap {
            return Err(Error::CapExceeded { what: "support guess", count: total, limit: cap });
        }
        Ok(GuessSpace {
            game: game.clone(),
            skeletons,
            support_slots,
            deviator_slots,
            perturber_slots,
            mode,
            counter: vec![0; radices.len()],
            done: total == 0,
            radices,
            index: 0,
            total,
        })
    }

    /// Size of the unfiltered space.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn skeletons(&self) -> &[Skeleton] {
        &self.skeletons
    }

    fn decode(&self) -> SupportGuess {
        let ar = self.game.arena();
        let (np, ns) = (ar.num_players(), ar.num_states());
        let mut supports: Vec<Vec<Vec<ActionId>>> = (0..np)
            .map(|i| {
                (0..ns)
                    .map(|s| vec![ar.allow(StateId(s), PlayerId(i))[0]])
                    .collect()
            })
            .collect();
        let mut pos = 0;
        for (i, s, options) in &self.support_slots {
            supports[i.0][s.0] = options[self.counter[pos]].clone();
            pos += 1;
        }
        let mut deviator = vec![vec![0; ns]; np];
        for (i, s) in &self.deviator_slots {
            deviator[i.0][s.0] = self.counter[pos];
            pos += 1;
        }
        let perturber = (self.mode == PerturberMode::Explicit).then(|| {
            let mut p: Vec<Vec<usize>> = self
                .skeletons
                .iter()
                .map(|sk| vec![0; sk.num_nodes - sk.num_states])
                .collect();
            for (i, k) in &self.perturber_slots {
                p[i.0][k - self.skeletons[i.0].num_states] = self.counter[pos];
                pos += 1;
            }
            p
        });
        SupportGuess { supports, deviator, perturber }
    }

    fn advance(&mut self) {
        let mut k = self.counter.len();
        loop {
            if k == 0 {
                self.done = true;
                return;
            }
            k -= 1;
            self.counter[k] += 1;
            if self.counter[k] < self.radices[k] {
                return;
            }
            self.counter[k] = 0;
        }
    }
}

impl Iterator for GuessSpace {
    /// Position in the unfiltered enumeration and the guess.
    type Item = (u128, SupportGuess);

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let guess = self.decode();
            let idx = self.index;
            self.index += 1;
            self.advance();
            if guess.perturber.is_none() || perturber_consistent(&self.game, &self.skeletons, &guess) {
                return Some((idx, guess));
            }
        }
        None
    }
}

/// States reached with positive probability when player `i` plays `a`
/// (or its support if `a` is `None`) and the others follow `supports`.
fn successors(game: &Game, supports: &[Vec<ActionId>], s: StateId, fixed: Option<(PlayerId, ActionId)>) -> BTreeSet<usize> {
    let single;
    let mut sups: Vec<&[ActionId]> = supports.iter().map(Vec::as_slice).collect();
    if let Some((i, a)) = fixed {
        single = [a];
        sups[i.0] = &single;
    }
    let mut out = BTreeSet::new();
    game.arena().for_each_joint(s, &sups, |_, d| out.extend(d.support().map(|t| t.0)));
    out
}

fn supports_at(guess: &SupportGuess, s: StateId) -> Vec<Vec<ActionId>> {
    guess.supports.iter().map(|per| per[s.0].clone()).collect()
}

/// States from which no final state is reachable under the guessed supports.
pub fn guessed_zero_reach(game: &Game, guess: &SupportGuess) -> BTreeSet<StateId> {
    let n = game.arena().num_states();
    let succ: Vec<BTreeSet<usize>> = (0..n)
        .map(|s| {
            if game.is_final(StateId(s)) {
                BTreeSet::new()
            } else {
                successors(game, &supports_at(guess, StateId(s)), StateId(s), None)
            }
        })
        .collect();
    let mut reach: Vec<bool> = (0..n).map(|s| game.is_final(StateId(s))).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if !reach[s] && succ[s].iter().any(|t| reach[*t]) {
                reach[s] = true;
                changed = true;
            }
        }
    }
    (0..n).filter(|s| !reach[*s]).map(StateId).collect()
}

/// Successor supports of every move of every node in player `i`'s
/// deviation game, with the deviator's guessed interval at state nodes.
fn node_moves(game: &Game, sk: &Skeleton, guess: &SupportGuess) -> Vec<Vec<BTreeSet<usize>>> {
    let i = sk.player;
    let ar = game.arena();
    let mut moves = vec![Vec::new(); sk.num_nodes];
    for s in ar.states() {
        if game.is_final(s) {
            continue;
        }
        let sup = supports_at(guess, s);
        let allow = ar.allow(s, i);
        match sk.first_interval[s.0] {
            None => moves[s.0].push(successors(game, &sup, s, Some((i, allow[0])))),
            Some(f) => {
                moves[s.0].push(BTreeSet::from([f + guess.deviator[i.0][s.0]]));
                let first = successors(game, &sup, s, Some((i, allow[0])));
                let second = successors(game, &sup, s, Some((i, allow[1])));
                for (k, (lo, hi)) in sk.intervals.iter().enumerate() {
                    for gamma in [lo, hi] {
                        let mut m = BTreeSet::new();
                        if gamma.is_positive() {
                            m.extend(first.iter().copied());
                        }
                        if gamma < &Q::one() {
                            m.extend(second.iter().copied());
                        }
                        moves[f + k].push(m);
                    }
                }
            }
        }
    }
    moves
}

/// Nodes of player `i`'s deviation game where the perturber can prevent
/// termination against the guessed deviator.
pub fn spoil_set(game: &Game, sk: &Skeleton, guess: &SupportGuess) -> Vec<bool> {
    let moves = node_moves(game, sk, guess);
    let mut good: Vec<bool> = (0..sk.num_nodes)
        .map(|k| k < sk.num_states && game.is_final(StateId(k)))
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for k in 0..sk.num_nodes {
            if good[k] || moves[k].is_empty() {
                continue;
            }
            let hits = |m: &BTreeSet<usize>| m.iter().any(|t| good[*t]);
            // state nodes carry a single move, so `all` covers both owners
            if moves[k].iter().all(hits) {
                good[k] = true;
                changed = true;
            }
        }
    }
    good.into_iter().map(|g| !g).collect()
}

/// An explicit perturber must stay inside the spoil set wherever it starts there.
fn perturber_consistent(game: &Game, skeletons: &[Skeleton], guess: &SupportGuess) -> bool {
    let Some(pert) = &guess.perturber else { return true };
    skeletons.iter().all(|sk| {
        let spoil = spoil_set(game, sk, guess);
        let moves = node_moves(game, sk, guess);
        (sk.num_states..sk.num_nodes).all(|k| {
            !spoil[k] || moves[k][pert[sk.player.0][k - sk.num_states]].iter().all(|t| spoil[*t])
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarMeaning {
    Strategy { player: PlayerId, state: StateId, action: ActionId },
    Payoff { player: PlayerId, state: StateId },
    DeviationValue { player: PlayerId, node: usize, label: String },
}

#[derive(Clone, Debug)]
pub struct EtrFormula {
    pub declarations: Vec<(String, VarMeaning)>,
    pub assertions: Vec<Term>,
}

impl EtrFormula {
    pub fn assertion_count(&self) -> usize {
        self.assertions.len()
    }

    pub fn term_count(&self) -> usize {
        self.assertions.iter().map(Term::size).sum()
    }

    pub fn is_nonlinear(&self) -> bool {
        self.assertions.iter().any(Term::is_nonlinear)
    }

    pub fn to_smtlib(&self) -> String {
        let mut out = String::from("(set-logic QF_NRA)\n");
        for (name, _) in &self.declarations {
            out.push_str(&format!("(declare-const {name} Real)\n"));
        }
        for a in &self.assertions {
            out.push_str(&format!("(assert {a})\n"));
        }
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }

    pub fn sidecar(&self, game: &Game) -> serde_json::Value {
        let ar = game.arena();
        let vars: serde_json::Map<String, serde_json::Value> = self
            .declarations
            .iter()
            .map(|(name, m)| {
                let v = match m {
                    VarMeaning::Strategy { player, state, action } => json!({
                        "kind": "strategy",
                        "player": ar.player_name(*player),
                        "state": ar.state_name(*state),
                        "action": ar.action_name(*action),
                    }),
                    VarMeaning::Payoff { player, state } => json!({
                        "kind": "payoff",
                        "player": ar.player_name(*player),
                        "state": ar.state_name(*state),
                    }),
                    VarMeaning::DeviationValue { player, node, label } => json!({
                        "kind": "deviation_value",
                        "player": ar.player_name(*player),
                        "node": node,
                        "label": label,
                    }),
                };
                (name.clone(), v)
            })
            .collect();
        json!({
            "variables": vars,
            "assertions": self.assertion_count(),
            "terms": self.term_count(),
        })
    }
}

pub fn strategy_var(i: PlayerId, s: StateId, a: ActionId) -> String {
    format!("p_i{}_s{}_a{}", i.0, s.0, a.0)
}

pub fn payoff_var(i: PlayerId, s: StateId) -> String {
    format!("u_i{}_s{}", i.0, s.0)
}

pub fn value_var(i: PlayerId, node: usize) -> String {
    format!("w_i{}_n{node}", i.0)
}

/// Per-player bounds on the payoff at the initial state.
pub type Bounds = Vec<Option<(Q, Q)>>;

pub fn emit_formula(
    game: &Game,
    epsilon: &Q,
    s0: StateId,
    bounds: &Bounds,
    spec: Option<&DeltaEpsilonSpec>,
    guess: &SupportGuess,
) -> Result<EtrFormula> {
    let ar = game.arena();
    if game.finals().any(|f| game.rewards(f).unwrap().iter().any(Q::is_negative)) {
        return Err(Error::NegativeRewards);
    }
    let skeletons = ar
        .players()
        .map(|i| Skeleton::new(game, i, epsilon))
        .collect::<Result<Vec<_>>>()?;
    let mut declarations = Vec::new();
    let mut assertions = Vec::new();

    // strategies; singleton supports are the constant 1
    let strategy_term = |i: PlayerId, s: StateId, a: ActionId| -> Term {
        let sup = &guess.supports[i.0][s.0];
        if !sup.contains(&a) {
            num(Q::zero())
        } else if sup.len() == 1 {
            num(Q::one())
        } else {
            var(strategy_var(i, s, a))
        }
    };
    for i in ar.players() {
        for s in game.non_finals() {
            let sup = &guess.supports[i.0][s.0];
            if sup.len() < 2 {
                continue;
            }
            for a in sup {
                let name = strategy_var(i, s, *a);
                declarations.push((name.clone(), VarMeaning::Strategy { player: i, state: s, action: *a }));
                assertions.push(lt(num(Q::zero()), var(&name)));
                assertions.push(le(var(&name), num(Q::one())));
            }
            assertions.push(eq(add(sup.iter().map(|a| strategy_term(i, s, *a)).collect()), num(Q::one())));
        }
    }
    if let Some(spec) = spec {
        for (i, s, a) in &spec.constraints {
            if game.is_final(*s) {
                continue;
            }
            if !guess.supports[i.0][s.0].contains(a) {
                assertions.push(Term::False);
            } else if guess.supports[i.0][s.0].len() > 1 {
                assertions.push(le(num(spec.epsilon.clone()), strategy_term(*i, *s, *a)));
            }
        }
    }

    // expected sum over the guessed joint support, with `fixed` overriding
    // one player's action and `value` giving the continuation at a state
    let expectation = |s: StateId, fixed: Option<(PlayerId, ActionId)>, value: &dyn Fn(StateId) -> Term| -> Term {
        let single;
        let mut sups: Vec<&[ActionId]> = guess.supports.iter().map(|per| per[s.0].as_slice()).collect();
        if let Some((i, a)) = fixed {
            single = [a];
            sups[i.0] = &single;
        }
        let mut parts = Vec::new();
        ar.for_each_joint(s, &sups, |joint, d| {
            let mut factors: Vec<Term> = joint
                .iter()
                .enumerate()
                .filter(|(j, _)| fixed.is_none_or(|(i, _)| i.0 != *j))
                .map(|(j, a)| strategy_term(PlayerId(j), s, *a))
                .collect();
            factors.push(add(
                d.entries()
                    .iter()
                    .map(|(t, p)| mul(vec![num(p.clone()), value(*t)]))
                    .collect(),
            ));
            parts.push(mul(factors));
        });
        add(parts)
    };

    // payoffs
    let zero = guessed_zero_reach(game, guess);
    for i in ar.players() {
        let payoff_term = |t: StateId| -> Term {
            match game.reward(t, i) {
                Some(r) => num(r.clone()),
                None => var(payoff_var(i, t)),
            }
        };
        for s in game.non_finals() {
            let name = payoff_var(i, s);
            declarations.push((name.clone(), VarMeaning::Payoff { player: i, state: s }));
            if zero.contains(&s) {
                assertions.push(eq(var(&name), num(Q::zero())));
            } else {
                assertions.push(eq(var(&name), expectation(s, None, &payoff_term)));
            }
        }
    }

    // deviation-game values
    for sk in &skeletons {
        let i = sk.player;
        let spoil = spoil_set(game, sk, guess);
        let node_term = |k: usize| -> Term {
            if k < sk.num_states {
                if let Some(r) = game.reward(StateId(k), i) {
                    return num(r.clone());
                }
            }
            var(value_var(i, k))
        };
        let state_value = |t: StateId| node_term(t.0);
        for k in 0..sk.num_nodes {
            if k < sk.num_states && game.is_final(StateId(k)) {
                continue;
            }
            declarations.push((
                value_var(i, k),
                VarMeaning::DeviationValue { player: i, node: k, label: sk.label(game, k) },
            ));
        }
        for s in game.non_finals() {
            let allow = ar.allow(s, i);
            let w = node_term(s.0);
            match sk.first_interval[s.0] {
                None => {
                    if spoil[s.0] {
                        assertions.push(eq(w, num(Q::zero())));
                    } else {
                        assertions.push(eq(w, expectation(s, Some((i, allow[0])), &state_value)));
                    }
                }
                Some(f) => {
                    if spoil[s.0] {
                        assertions.push(eq(w.clone(), num(Q::zero())));
                    } else {
                        assertions.push(eq(w.clone(), node_term(f + guess.deviator[i.0][s.0])));
                    }
                    for k in 0..4 {
                        assertions.push(le(node_term(f + k), w.clone()));
                    }
                    let first = expectation(s, Some((i, allow[0])), &state_value);
                    let second = expectation(s, Some((i, allow[1])), &state_value);
                    for (k, (lo, hi)) in sk.intervals.iter().enumerate() {
                        let node = f + k;
                        let wk = node_term(node);
                        if spoil[node] {
                            assertions.push(eq(wk, num(Q::zero())));
                            continue;
                        }
                        let endpoint = |gamma: &Q| {
                            add(vec![
                                mul(vec![num(gamma.clone()), first.clone()]),
                                mul(vec![num(Q::one() - gamma), second.clone()]),
                            ])
                        };
                        let ends = [endpoint(lo), endpoint(hi)];
                        match &guess.perturber {
                            None => {
                                assertions.push(le(wk.clone(), ends[0].clone()));
                                assertions.push(le(wk.clone(), ends[1].clone()));
                                assertions.push(or(vec![
                                    eq(wk.clone(), ends[0].clone()),
                                    eq(wk, ends[1].clone()),
                                ]));
                            }
                            Some(p) => {
                                let c = p[i.0][node - sk.num_states];
                                assertions.push(eq(wk.clone(), ends[c].clone()));
                                assertions.push(le(wk, ends[1 - c].clone()));
                            }
                        }
                    }
                }
            }
        }
        // stability at the initial state
        if !game.is_final(s0) {
            assertions.push(le(node_term(s0.0), var(payoff_var(i, s0))));
        }
    }

    for i in ar.players() {
        if let Some((lo, hi)) = bounds.get(i.0).cloned().flatten() {
            let u = match game.reward(s0, i) {
                Some(r) => num(r.clone()),
                None => var(payoff_var(i, s0)),
            };
            assertions.push(and(vec![le(num(lo), u.clone()), le(u, num(hi))]));
        }
    }

    Ok(EtrFormula { declarations, assertions })
}

/// Rewards moved up so that the smallest is 0 (no change if already nonnegative).
pub fn shift_rewards(game: &Game) -> Result<(Game, Q)> {
    let min = game
        .finals()
        .flat_map(|f| game.rewards(f).unwrap().to_vec())
        .min()
        .unwrap_or_else(Q::zero);
    let shift = if min.is_negative() { -min } else { Q::zero() };
    let rewards = game
        .arena()
        .states()
        .map(|s| game.rewards(s).map(|r| r.iter().map(|x| x + &shift).collect()))
        .collect();
    Ok((game.with_rewards(rewards)?, shift))
}

/// Final strategy values keyed by variable name, for reading a model back.
pub fn strategy_variables(formula: &EtrFormula) -> BTreeMap<String, (PlayerId, StateId, ActionId)> {
    formula
        .declarations
        .iter()
        .filter_map(|(n, m)| match m {
            VarMeaning::Strategy { player, state, action } => Some((n.clone(), (*player, *state, *action))),
            _ => None,
        })
        .collect()
}
