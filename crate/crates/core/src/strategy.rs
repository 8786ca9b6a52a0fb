//! Stationary strategies and the sets they are constrained to.
//!
//! The distance between two distributions over actions is the L-infinity
//! distance of their probability vectors; between two stationary strategies
//! it is the maximum of that over states.

use std::collections::{BTreeMap, BTreeSet};

use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{ActionId, Distribution, Game, PlayerId, StateId};
use crate::rational::{format_rational, parse_rational, Q};

/// Vertex enumeration and polytope work are limited to this many actions per
/// state.
pub const MAX_VERTEX_ACTIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StationaryStrategy {
    pub player: PlayerId,
    /// indexed by state
    pub choice: Vec<Distribution<ActionId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StationaryProfile {
    /// indexed by player
    pub strategies: Vec<StationaryStrategy>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEpsilonSpec {
    pub epsilon: Q,
    pub constraints: BTreeSet<(PlayerId, StateId, ActionId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSpec {
    pub center: StationaryStrategy,
    pub radius: Q,
}

impl StationaryStrategy {
    pub fn pure(player: PlayerId, actions: Vec<ActionId>) -> Self {
        StationaryStrategy {
            player,
            choice: actions.into_iter().map(Distribution::dirac).collect(),
        }
    }

    pub fn uniform(game: &Game, player: PlayerId) -> Self {
        let a = game.arena();
        let choice = a
            .states()
            .map(|s| {
                let acts = a.allow(s, player);
                let p = Q::new(1.into(), (acts.len() as i64).into());
                Distribution::new(acts.iter().map(|x| (*x, p.clone()))).unwrap()
            })
            .collect();
        StationaryStrategy { player, choice }
    }

    pub fn at(&self, s: StateId) -> &Distribution<ActionId> {
        &self.choice[s.0]
    }

    pub fn prob(&self, s: StateId, a: ActionId) -> Q {
        self.choice[s.0].prob(a)
    }

    pub fn is_pure(&self) -> bool {
        self.choice.iter().all(Distribution::is_dirac)
    }

    /// Checks supports against the allow sets of `game`.
    pub fn validate(&self, game: &Game) -> Result<()> {
        let a = game.arena();
        if self.player.0 >= a.num_players() || self.choice.len() != a.num_states() {
            return Err(Error::Mismatch);
        }
        for s in a.states() {
            for act in self.choice[s.0].support() {
                if !a.is_allowed(s, self.player, act) {
                    return Err(Error::DisallowedAction {
                        state: a.state_name(s).to_string(),
                        player: a.player_name(self.player).to_string(),
                        action: a.action_names().get(act.0).cloned().unwrap_or_default(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl StationaryProfile {
    pub fn uniform(game: &Game) -> Self {
        StationaryProfile {
            strategies: game
                .arena()
                .players()
                .map(|i| StationaryStrategy::uniform(game, i))
                .collect(),
        }
    }

    pub fn pure(game: &Game, choice: &[Vec<ActionId>]) -> Self {
        StationaryProfile {
            strategies: game
                .arena()
                .players()
                .map(|i| StationaryStrategy::pure(i, choice[i.0].clone()))
                .collect(),
        }
    }

    pub fn get(&self, i: PlayerId) -> &StationaryStrategy {
        &self.strategies[i.0]
    }

    /// `sigma[i / replacement]`
    pub fn replace(&self, replacement: StationaryStrategy) -> Self {
        let mut out = self.clone();
        let i = replacement.player.0;
        out.strategies[i] = replacement;
        out
    }

    pub fn validate(&self, game: &Game) -> Result<()> {
        if self.strategies.len() != game.arena().num_players() {
            return Err(Error::Mismatch);
        }
        for (i, st) in self.strategies.iter().enumerate() {
            if st.player.0 != i {
                return Err(Error::Mismatch);
            }
            st.validate(game)?;
        }
        Ok(())
    }

    pub fn support(&self, i: PlayerId, s: StateId) -> Vec<ActionId> {
        self.strategies[i.0].choice[s.0].support().collect()
    }
}

pub fn distribution_distance(a: &Distribution<ActionId>, b: &Distribution<ActionId>) -> Q {
    let keys: BTreeSet<ActionId> = a.support().chain(b.support()).collect();
    keys.into_iter()
        .map(|k| (a.prob(k) - b.prob(k)).abs())
        .max()
        .unwrap_or_else(Q::zero)
}

pub fn distance(a: &StationaryStrategy, b: &StationaryStrategy) -> Result<Q> {
    if a.player != b.player || a.choice.len() != b.choice.len() {
        return Err(Error::Mismatch);
    }
    Ok(a.choice
        .iter()
        .zip(&b.choice)
        .map(|(x, y)| distribution_distance(x, y))
        .max()
        .unwrap_or_else(Q::zero))
}

pub fn in_ball(candidate: &StationaryStrategy, ball: &BallSpec) -> Result<bool> {
    Ok(distance(candidate, &ball.center)? <= ball.radius)
}

impl DeltaEpsilonSpec {
    pub fn lower_bound(&self, i: PlayerId, s: StateId, a: ActionId) -> Q {
        if self.constraints.contains(&(i, s, a)) {
            self.epsilon.clone()
        } else {
            Q::zero()
        }
    }

    fn check_arena(&self, game: &Game) -> Result<()> {
        let ar = game.arena();
        for &(i, s, a) in &self.constraints {
            if i.0 >= ar.num_players() || s.0 >= ar.num_states() || !ar.is_allowed(s, i, a) {
                return Err(Error::Mismatch);
            }
        }
        Ok(())
    }
}

pub fn in_delta_epsilon(profile: &StationaryProfile, spec: &DeltaEpsilonSpec) -> Result<bool> {
    for &(i, s, a) in &spec.constraints {
        let st = profile.strategies.get(i.0).ok_or(Error::Mismatch)?;
        let d = st.choice.get(s.0).ok_or(Error::Mismatch)?;
        if d.prob(a) < spec.epsilon {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Euclidean projection of `x` onto `{ y : y >= lower, sum y = 1 }`.
/// Returns `None` when the lower bounds sum to more than 1.
pub fn project_onto_floor_simplex(x: &[Q], lower: &[Q]) -> Option<Vec<Q>> {
    let mass = Q::one() - lower.iter().sum::<Q>();
    if mass.is_negative() {
        return None;
    }
    if mass.is_zero() {
        return Some(lower.to_vec());
    }
    // project z = x - lower onto the simplex of the remaining mass
    let z: Vec<Q> = x.iter().zip(lower).map(|(a, l)| a - l).collect();
    let mut sorted = z.clone();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut cumulative = Q::zero();
    let mut tau = Q::zero();
    for (k, u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (&cumulative - &mass) / Q::from_integer(((k + 1) as i64).into());
        if u > &t {
            tau = t;
        }
    }
    Some(
        z.iter()
            .zip(lower)
            .map(|(zi, l)| {
                let v = zi - &tau;
                l + if v.is_positive() { v } else { Q::zero() }
            })
            .collect(),
    )
}

pub fn project_to_delta_epsilon(
    game: &Game,
    profile: &StationaryProfile,
    spec: &DeltaEpsilonSpec,
) -> Result<StationaryProfile> {
    spec.check_arena(game)?;
    profile.validate(game)?;
    let ar = game.arena();
    let mut out = profile.clone();
    for i in ar.players() {
        for s in ar.states() {
            let acts = ar.allow(s, i);
            let lower: Vec<Q> = acts.iter().map(|a| spec.lower_bound(i, s, *a)).collect();
            if lower.iter().all(Zero::is_zero) {
                continue;
            }
            let d = profile.get(i).at(s);
            let x: Vec<Q> = acts.iter().map(|a| d.prob(*a)).collect();
            let y = project_onto_floor_simplex(&x, &lower).ok_or_else(|| Error::Infeasible {
                state: ar.state_name(s).to_string(),
                player: ar.player_name(i).to_string(),
            })?;
            out.strategies[i.0].choice[s.0] =
                Distribution::new(acts.iter().copied().zip(y)).expect("projection is a distribution");
        }
    }
    Ok(out)
}

/// Every pure memoryless strategy of player `i`. Final states are fixed to
/// their first allowed action since play there does not matter; the order is
/// lexicographic over non-final states with the first state most significant.
pub fn enumerate_pure_memoryless(game: &Game, i: PlayerId) -> Vec<StationaryStrategy> {
    let ar = game.arena();
    let options: Vec<Vec<ActionId>> = ar
        .states()
        .map(|s| {
            let acts = ar.allow(s, i);
            if game.is_final(s) {
                vec![acts[0]]
            } else {
                acts.to_vec()
            }
        })
        .collect();
    product(&options)
        .into_iter()
        .map(|acts| StationaryStrategy::pure(i, acts))
        .collect()
}

/// Number of pure memoryless strategies of player `i` (finals fixed).
pub fn count_pure_memoryless(game: &Game, i: PlayerId) -> u128 {
    game.non_finals()
        .map(|s| game.arena().allow(s, i).len() as u128)
        .product()
}

/// Cartesian product, last coordinate fastest.
pub(crate) fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::with_capacity(options.len())];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Vertices of `{ y in simplex : lo <= y <= hi }` for box bounds `lo`, `hi`.
/// A vertex fixes all but one coordinate at a bound; the free coordinate is
/// whatever makes the sum 1.
pub fn box_simplex_vertices(lo: &[Q], hi: &[Q]) -> Vec<Vec<Q>> {
    let m = lo.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for free in 0..m {
        for mask in 0u32..(1 << (m - 1)) {
            let mut y = vec![Q::zero(); m];
            let mut bit = 0;
            for (k, slot) in y.iter_mut().enumerate() {
                if k == free {
                    continue;
                }
                *slot = if mask >> bit & 1 == 1 { hi[k].clone() } else { lo[k].clone() };
                bit += 1;
            }
            let rest: Q = y.iter().sum();
            let f = Q::one() - rest;
            if f < lo[free] || f > hi[free] {
                continue;
            }
            y[free] = f;
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
    }
    out
}

/// Vertices of the epsilon-ball around `ball.center` at state `s`, within the
/// simplex over `allow(s, i)`.
pub fn ball_vertices(
    game: &Game,
    s: StateId,
    i: PlayerId,
    ball: &BallSpec,
) -> Result<Vec<Distribution<ActionId>>> {
    let ar = game.arena();
    let acts = ar.allow(s, i);
    if acts.len() > MAX_VERTEX_ACTIONS {
        return Err(Error::TooManyActions {
            player: ar.player_name(i).to_string(),
            state: ar.state_name(s).to_string(),
            count: acts.len(),
            max: MAX_VERTEX_ACTIONS,
        });
    }
    let center = ball.center.choice.get(s.0).ok_or(Error::Mismatch)?;
    let (zero, one) = (Q::zero(), Q::one());
    let lo: Vec<Q> = acts
        .iter()
        .map(|a| (center.prob(*a) - &ball.radius).max(zero.clone()))
        .collect();
    let hi: Vec<Q> = acts
        .iter()
        .map(|a| (center.prob(*a) + &ball.radius).min(one.clone()))
        .collect();
    Ok(box_simplex_vertices(&lo, &hi)
        .into_iter()
        .map(|y| Distribution::new(acts.iter().copied().zip(y)).expect("vertex"))
        .collect())
}

/// Vertices of `{ y in simplex over allow(s,i) : y(a) >= eps for constrained a }`:
/// the floor plus all the remaining mass on a single action.
pub fn delta_epsilon_vertices(
    game: &Game,
    s: StateId,
    i: PlayerId,
    spec: &DeltaEpsilonSpec,
) -> Result<Vec<Distribution<ActionId>>> {
    let ar = game.arena();
    let acts = ar.allow(s, i);
    let lower: Vec<Q> = acts.iter().map(|a| spec.lower_bound(i, s, *a)).collect();
    let mass = Q::one() - lower.iter().sum::<Q>();
    if mass.is_negative() {
        return Err(Error::Infeasible {
            state: ar.state_name(s).to_string(),
            player: ar.player_name(i).to_string(),
        });
    }
    let mut out: Vec<Distribution<ActionId>> = Vec::new();
    for k in 0..acts.len() {
        let mut y = lower.clone();
        y[k] += &mass;
        let d = Distribution::new(acts.iter().copied().zip(y)).expect("vertex");
        if !out.contains(&d) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Profile file: player -> state -> action -> probability. Missing actions
/// have probability 0; missing final states default to their first action.
pub fn parse_profile(game: &Game, text: &str) -> Result<StationaryProfile> {
    let raw: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>> =
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let ar = game.arena();
    for p in raw.keys() {
        ar.player_id(p)?;
    }
    let mut strategies = Vec::new();
    for i in ar.players() {
        let pname = ar.player_name(i);
        let per_state = raw
            .get(pname)
            .ok_or_else(|| Error::InvalidProfile(format!("no strategy for player {pname:?}")))?;
        for sname in per_state.keys() {
            ar.state_id(sname)?;
        }
        let mut choice = Vec::new();
        for s in ar.states() {
            let sname = ar.state_name(s);
            let d = match per_state.get(sname) {
                None if game.is_final(s) => Distribution::dirac(ar.allow(s, i)[0]),
                None => {
                    return Err(Error::InvalidProfile(format!(
                        "player {pname:?} has no distribution at {sname:?}"
                    )))
                }
                Some(acts) => {
                    let mut entries = Vec::new();
                    for (aname, p) in acts {
                        let a = ar.action_id(aname).filter(|a| ar.is_allowed(s, i, *a)).ok_or_else(|| {
                            Error::DisallowedAction {
                                state: sname.to_string(),
                                player: pname.to_string(),
                                action: aname.clone(),
                            }
                        })?;
                        entries.push((a, parse_rational(p)?));
                    }
                    Distribution::new(entries)
                        .map_err(|m| Error::InvalidProfile(format!("{m} for {pname:?} at {sname:?}")))?
                }
            };
            choice.push(d);
        }
        strategies.push(StationaryStrategy { player: i, choice });
    }
    Ok(StationaryProfile { strategies })
}

pub fn profile_to_json(game: &Game, profile: &StationaryProfile) -> serde_json::Value {
    use serde_json::{Map, Value};
    let ar = game.arena();
    let mut out = Map::new();
    for st in &profile.strategies {
        out.insert(ar.player_name(st.player).to_string(), strategy_to_json(game, st));
    }
    Value::Object(out)
}

pub fn strategy_to_json(game: &Game, st: &StationaryStrategy) -> serde_json::Value {
    use serde_json::{Map, Value};
    let ar = game.arena();
    let mut per_state = Map::new();
    for s in ar.states() {
        let mut acts = Map::new();
        for (a, p) in st.choice[s.0].entries() {
            acts.insert(ar.action_name(*a).to_string(), Value::String(format_rational(p)));
        }
        per_state.insert(ar.state_name(s).to_string(), Value::Object(acts));
    }
    Value::Object(per_state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn projection_examples() {
        // 2 actions, Dirac(a), constraint on b
        let y = project_onto_floor_simplex(&[q(1, 1), q(0, 1)], &[q(0, 1), q(1, 10)]).unwrap();
        assert_eq!(y, vec![q(9, 10), q(1, 10)]);
        let y = project_onto_floor_simplex(&[q(1, 1), q(0, 1), q(0, 1)], &[q(0, 1), q(1, 10), q(1, 10)])
            .unwrap();
        assert_eq!(y, vec![q(4, 5), q(1, 10), q(1, 10)]);
        // already feasible
        let x = vec![q(1, 2), q(1, 4), q(1, 4)];
        assert_eq!(project_onto_floor_simplex(&x, &[q(1, 10), q(1, 10), q(0, 1)]).unwrap(), x);
        assert!(project_onto_floor_simplex(&x, &[q(1, 2), q(1, 2), q(1, 10)]).is_none());
    }

    #[test]
    fn box_vertices_two_actions() {
        let v = box_simplex_vertices(&[q(9, 10), q(0, 1)], &[q(1, 1), q(1, 10)]);
        assert_eq!(v.len(), 2);
        assert!(v.contains(&vec![q(1, 1), q(0, 1)]));
        assert!(v.contains(&vec![q(9, 10), q(1, 10)]));
    }

    #[test]
    fn product_order() {
        let p = product(&[vec![0, 1], vec![5, 6]]);
        assert_eq!(p, vec![vec![0, 5], vec![0, 6], vec![1, 5], vec![1, 6]]);
        assert_eq!(product::<u8>(&[]), vec![Vec::<u8>::new()]);
    }
}
