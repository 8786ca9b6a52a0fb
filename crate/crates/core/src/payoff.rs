//! Expected terminal payoffs of stationary profiles.

use std::collections::BTreeSet;

use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, Row};
use crate::error::Result;
use crate::mdp::{Goal, Mdp, Method};
use crate::model::{ActionId, Distribution, Game, PlayerId, StateId};
use crate::rational::{format_rational, to_f64, Q};
use crate::strategy::{
    ball_vertices, delta_epsilon_vertices, BallSpec, DeltaEpsilonSpec, StationaryProfile,
    StationaryStrategy,
};

/// `values[player][state]`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffVector {
    pub values: Vec<Vec<Q>>,
}

impl PayoffVector {
    pub fn at(&self, i: PlayerId, s: StateId) -> &Q {
        &self.values[i.0][s.0]
    }

    /// Payoffs of every player at `s`.
    pub fn column(&self, s: StateId) -> Vec<Q> {
        self.values.iter().map(|v| v[s.0].clone()).collect()
    }

    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let ar = game.arena();
        let mut out = serde_json::Map::new();
        for i in ar.players() {
            let mut per_state = serde_json::Map::new();
            for s in ar.states() {
                per_state.insert(
                    ar.state_name(s).to_string(),
                    format_rational(self.at(i, s)).into(),
                );
            }
            out.insert(ar.player_name(i).to_string(), per_state.into());
        }
        out.into()
    }

    pub fn to_csv(&self, game: &Game) -> String {
        let ar = game.arena();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["state", "player", "value"]).unwrap();
        for s in ar.states() {
            for i in ar.players() {
                w.write_record([ar.state_name(s), ar.player_name(i), &format_rational(self.at(i, s))])
                    .unwrap();
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// One-step state distribution at `s` when player `i` plays `a` and everyone
/// else follows `profile`.
pub fn coplayer_mixture(
    game: &Game,
    profile: &StationaryProfile,
    i: PlayerId,
    s: StateId,
    a: ActionId,
) -> Distribution<StateId> {
    joint_mixture(game, profile, s, Some((i, a)))
}

/// One-step state distribution at `s` under `profile`.
pub fn step_distribution(game: &Game, profile: &StationaryProfile, s: StateId) -> Distribution<StateId> {
    joint_mixture(game, profile, s, None)
}

fn joint_mixture(
    game: &Game,
    profile: &StationaryProfile,
    s: StateId,
    fixed: Option<(PlayerId, ActionId)>,
) -> Distribution<StateId> {
    let supports: Vec<Vec<ActionId>> = game
        .arena()
        .players()
        .map(|j| match fixed {
            Some((i, a)) if i == j => vec![a],
            _ => profile.support(j, s),
        })
        .collect();
    let refs: Vec<&[ActionId]> = supports.iter().map(Vec::as_slice).collect();
    let mut parts: Vec<(Q, Distribution<StateId>)> = Vec::new();
    game.arena().for_each_joint(s, &refs, |joint, d| {
        let w: Q = joint
            .iter()
            .enumerate()
            .filter(|(j, _)| fixed.is_none_or(|(i, _)| i.0 != *j))
            .map(|(j, a)| profile.get(PlayerId(j)).prob(s, *a))
            .product();
        parts.push((w, d.clone()));
    });
    Distribution::mixture(parts.iter().map(|(w, d)| (w.clone(), d)))
}

/// The Markov chain induced by `profile`, with reward vectors at finals.
pub fn markov_chain(game: &Game, profile: &StationaryProfile) -> Chain {
    let rows = game
        .arena()
        .states()
        .map(|s| match game.rewards(s) {
            Some(r) => Row::Terminal(r.to_vec()),
            None => Row::Step(step_distribution(game, profile, s).map_keys(|t| t.0)),
        })
        .collect();
    Chain::new(rows, game.arena().num_players())
}

/// States from which no final state is reached under `profile`.
pub fn zero_reach_states(game: &Game, profile: &StationaryProfile) -> BTreeSet<StateId> {
    markov_chain(game, profile)
        .zero_reach()
        .into_iter()
        .enumerate()
        .filter(|(_, z)| *z)
        .map(|(s, _)| StateId(s))
        .collect()
}

pub fn evaluate_profile(game: &Game, profile: &StationaryProfile) -> Result<PayoffVector> {
    let by_state = markov_chain(game, profile).values()?;
    Ok(transpose(by_state, game.arena().num_players()))
}

fn transpose(by_state: Vec<Vec<Q>>, players: usize) -> PayoffVector {
    let mut values = vec![Vec::with_capacity(by_state.len()); players];
    for row in by_state {
        for (i, v) in row.into_iter().enumerate() {
            values[i].push(v);
        }
    }
    PayoffVector { values }
}

/// Expected reward collected by runs that are absorbed within `horizon` steps.
pub fn bounded_horizon_payoff(
    game: &Game,
    profile: &StationaryProfile,
    horizon: usize,
) -> PayoffVector {
    let chain = markov_chain(game, profile);
    transpose(bounded_values(&chain, horizon), chain.dims)
}

fn bounded_values(chain: &Chain, horizon: usize) -> Vec<Vec<Q>> {
    let n = chain.dims;
    let mut v: Vec<Vec<Q>> = chain
        .rows
        .iter()
        .map(|r| match r {
            Row::Terminal(nu) => nu.clone(),
            Row::Step(_) => vec![Q::zero(); n],
        })
        .collect();
    for _ in 0..horizon {
        v = chain
            .rows
            .iter()
            .enumerate()
            .map(|(s, r)| match r {
                Row::Terminal(_) => v[s].clone(),
                Row::Step(d) => (0..n)
                    .map(|k| d.entries().iter().map(|(t, p)| p * &v[*t][k]).sum())
                    .collect(),
            })
            .collect();
    }
    v
}

/// Probability of being absorbed in a final state within `horizon` steps,
/// indexed by start state.
pub fn absorption_probability(
    game: &Game,
    profile: &StationaryProfile,
    horizon: usize,
) -> Vec<Q> {
    let mut chain = markov_chain(game, profile);
    for r in chain.rows.iter_mut() {
        if let Row::Terminal(nu) = r {
            *nu = vec![Q::one()];
        }
    }
    chain.dims = 1;
    bounded_values(&chain, horizon).into_iter().map(|mut v| v.remove(0)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub horizon: usize,
    /// per player
    pub mean: Vec<f64>,
    /// per player, half-width of the 95% normal confidence interval
    pub half_width: Vec<f64>,
    /// `absorbed_by[t]`: fraction of runs absorbed within `t` steps
    pub absorbed_by: Vec<f64>,
}

struct Sampler {
    final_reward: Vec<Option<Vec<f64>>>,
    /// cumulative distribution per non-final state
    cdf: Vec<Vec<(f64, usize)>>,
}

impl Sampler {
    fn new(game: &Game, profile: &StationaryProfile) -> Self {
        let ar = game.arena();
        let final_reward = ar
            .states()
            .map(|s| game.rewards(s).map(|r| r.iter().map(to_f64).collect()))
            .collect();
        let cdf = ar
            .states()
            .map(|s| {
                let mut acc = 0.0;
                step_distribution(game, profile, s)
                    .entries()
                    .iter()
                    .map(|(t, p)| {
                        acc += to_f64(p);
                        (acc, t.0)
                    })
                    .collect()
            })
            .collect();
        Sampler { final_reward, cdf }
    }

    /// Rewards and absorption time of one run, `None` if not absorbed.
    fn run(&self, mut s: usize, horizon: usize, rng: &mut ChaCha8Rng) -> Option<(usize, &[f64])> {
        for t in 0..=horizon {
            if let Some(r) = &self.final_reward[s] {
                return Some((t, r));
            }
            if t == horizon {
                break;
            }
            let u: f64 = rng.gen();
            let row = &self.cdf[s];
            s = row.iter().find(|(c, _)| u < *c).unwrap_or(row.last().unwrap()).1;
        }
        None
    }
}

/// Seeded simulation of `samples` runs from `s0`, truncated at `horizon`.
/// Sample `k` draws from stream `k` of the seeded generator, so the result
/// does not depend on the thread count.
pub fn monte_carlo_estimate(
    game: &Game,
    profile: &StationaryProfile,
    s0: StateId,
    samples: usize,
    horizon: usize,
    seed: u64,
) -> MonteCarloEstimate {
    let n = game.arena().num_players();
    let sampler = Sampler::new(game, profile);
    let runs: Vec<Option<(usize, Vec<f64>)>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            sampler.run(s0.0, horizon, &mut rng).map(|(t, r)| (t, r.to_vec()))
        })
        .collect();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut absorbed_at = vec![0usize; horizon + 1];
    for (t, r) in runs.iter().flatten() {
        absorbed_at[*t] += 1;
        for k in 0..n {
            sum[k] += r[k];
            sum_sq[k] += r[k] * r[k];
        }
    }
    let m = samples.max(1) as f64;
    let mean: Vec<f64> = sum.iter().map(|x| x / m).collect();
    let half_width = (0..n)
        .map(|k| {
            if samples < 2 {
                return f64::INFINITY;
            }
            let var = ((sum_sq[k] - m * mean[k] * mean[k]) / (m - 1.0)).max(0.0);
            1.96 * (var / m).sqrt()
        })
        .collect();
    let mut acc = 0usize;
    let absorbed_by = absorbed_at
        .iter()
        .map(|c| {
            acc += c;
            acc as f64 / m
        })
        .collect();
    MonteCarloEstimate {
        samples,
        horizon,
        mean,
        half_width,
        absorbed_by,
    }
}

/// Per-state vertex sets a controlled player mixes over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedActionSet {
    pub player: PlayerId,
    /// indexed by state
    pub vertices: Vec<Vec<Distribution<ActionId>>>,
}

impl ConstrainedActionSet {
    pub fn full_simplex(game: &Game, i: PlayerId) -> Self {
        let ar = game.arena();
        ConstrainedActionSet {
            player: i,
            vertices: ar
                .states()
                .map(|s| ar.allow(s, i).iter().map(|a| Distribution::dirac(*a)).collect())
                .collect(),
        }
    }

    pub fn ball(game: &Game, ball: &BallSpec) -> Result<Self> {
        let i = ball.center.player;
        Ok(ConstrainedActionSet {
            player: i,
            vertices: game
                .arena()
                .states()
                .map(|s| ball_vertices(game, s, i, ball))
                .collect::<Result<_>>()?,
        })
    }

    pub fn delta_epsilon(game: &Game, i: PlayerId, spec: &DeltaEpsilonSpec) -> Result<Self> {
        Ok(ConstrainedActionSet {
            player: i,
            vertices: game
                .arena()
                .states()
                .map(|s| delta_epsilon_vertices(game, s, i, spec))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponse {
    /// value for the controlled player, indexed by state
    pub values: Vec<Q>,
    pub witness: StationaryStrategy,
}

/// Optimal value of player `i` choosing one vertex per state while the other
/// players follow `profile`. `Goal::Min` gives the worst case over the set.
pub fn constrained_best_response(
    game: &Game,
    profile: &StationaryProfile,
    actions: &ConstrainedActionSet,
    goal: Goal,
) -> Result<BestResponse> {
    let i = actions.player;
    let ar = game.arena();
    let mut terminal = Vec::with_capacity(ar.num_states());
    let mut choices = Vec::with_capacity(ar.num_states());
    for s in ar.states() {
        match game.reward(s, i) {
            Some(r) => {
                terminal.push(Some(r.clone()));
                choices.push(Vec::new());
            }
            None => {
                let per_action: Vec<(ActionId, Distribution<StateId>)> = ar
                    .allow(s, i)
                    .iter()
                    .map(|a| (*a, coplayer_mixture(game, profile, i, s, *a)))
                    .collect();
                terminal.push(None);
                choices.push(
                    actions.vertices[s.0]
                        .iter()
                        .map(|v| {
                            Distribution::mixture(v.entries().iter().map(|(a, p)| {
                                let d = &per_action.iter().find(|(b, _)| b == a).unwrap().1;
                                (p.clone(), d)
                            }))
                            .map_keys(|t| t.0)
                        })
                        .collect(),
                );
            }
        }
    }
    let sol = Mdp { terminal, choices }.solve(goal, Method::default())?;
    let witness = StationaryStrategy {
        player: i,
        choice: ar
            .states()
            .map(|s| actions.vertices[s.0][sol.policy[s.0]].clone())
            .collect(),
    };
    Ok(BestResponse {
        values: sol.values,
        witness,
    })
}
