//! Imprecise deviations of a single player.
//!
//! With the other players fixed, a deviating player faces a one-player game.
//! Its imprecise version is a turn-based game against a perturber: at a state
//! with actions `a`, `b` the deviator commits to an interval for the
//! probability of `a` and the perturber picks where in that interval the
//! realized distribution lies. Only interval endpoints need to be offered to
//! the perturber.

use num::traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::mdp::{Goal, Mdp, Method, ENUMERATION_LIMIT};
use crate::model::{ActionId, Distribution, Game, PlayerId, StateId};
use crate::payoff::{coplayer_mixture, constrained_best_response, ConstrainedActionSet};
use crate::rational::{format_rational, to_f64, Q};
use crate::strategy::{
    distance, enumerate_pure_memoryless, strategy_to_json, BallSpec, StationaryProfile,
    StationaryStrategy,
};

/// The game seen by player `player` when everybody else is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePlayerGame {
    pub player: PlayerId,
    /// `allow[s]`, sorted
    pub allow: Vec<Vec<ActionId>>,
    /// `tab[s][k]`: outcome of the `k`-th allowed action
    pub tab: Vec<Vec<Distribution<StateId>>>,
    /// reward of `player` at final states
    pub reward: Vec<Option<Q>>,
}

impl OnePlayerGame {
    pub fn num_states(&self) -> usize {
        self.allow.len()
    }

    /// One-step distribution when playing `d` at `s`.
    pub fn step(&self, s: StateId, d: &Distribution<ActionId>) -> Distribution<StateId> {
        Distribution::mixture(d.entries().iter().map(|(a, p)| {
            let k = self.allow[s.0].binary_search(a).expect("action not allowed");
            (p.clone(), &self.tab[s.0][k])
        }))
    }

    pub fn evaluate(&self, st: &StationaryStrategy) -> Result<Vec<Q>> {
        let mdp = Mdp {
            terminal: self.reward.clone(),
            choices: (0..self.num_states())
                .map(|s| vec![self.step(StateId(s), st.at(StateId(s))).map_keys(|t| t.0)])
                .collect(),
        };
        mdp.evaluate(&vec![0; self.num_states()])
    }
}

pub fn fix_coplayers(game: &Game, profile: &StationaryProfile, i: PlayerId) -> OnePlayerGame {
    let ar = game.arena();
    OnePlayerGame {
        player: i,
        allow: ar.states().map(|s| ar.allow(s, i).to_vec()).collect(),
        tab: ar
            .states()
            .map(|s| {
                ar.allow(s, i)
                    .iter()
                    .map(|a| coplayer_mixture(game, profile, i, s, *a))
                    .collect()
            })
            .collect(),
        reward: ar.states().map(|s| game.reward(s, i).cloned()).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Deviator,
    Perturber,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TbNode {
    pub owner: Owner,
    /// original state this node belongs to
    pub state: StateId,
    /// `Some((alpha, beta))` for interval nodes
    pub interval: Option<(Q, Q)>,
    /// successor distributions over node indices
    pub moves: Vec<Distribution<usize>>,
    pub reward: Option<Q>,
}

/// Nodes `0..n` are the original states, interval nodes follow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnBasedGame {
    pub player: PlayerId,
    pub epsilon: Q,
    pub nodes: Vec<TbNode>,
    pub num_states: usize,
}

/// The four intervals offered at a two-action state, clamped to `[0, 1]`.
pub fn interval_bounds(epsilon: &Q) -> [(Q, Q); 4] {
    let clamp = |x: Q| x.max(Q::zero()).min(Q::one());
    let two = epsilon * Q::from_integer(2.into());
    [
        (Q::zero(), clamp(epsilon.clone())),
        (Q::zero(), clamp(two.clone())),
        (clamp(Q::one() - &two), Q::one()),
        (clamp(Q::one() - epsilon), Q::one()),
    ]
}

pub fn build_deviation_game(one: &OnePlayerGame, epsilon: &Q) -> Result<TurnBasedGame> {
    let n = one.num_states();
    let mut nodes: Vec<TbNode> = Vec::with_capacity(n);
    let mut extra: Vec<TbNode> = Vec::new();
    for s in 0..n {
        let state = StateId(s);
        if let Some(r) = &one.reward[s] {
            nodes.push(TbNode {
                owner: Owner::Terminal,
                state,
                interval: None,
                moves: Vec::new(),
                reward: Some(r.clone()),
            });
            continue;
        }
        let moves = match one.allow[s].len() {
            1 => vec![one.tab[s][0].map_keys(|t| t.0)],
            2 => interval_bounds(epsilon)
                .into_iter()
                .map(|(lo, hi)| {
                    let endpoint = |alpha: &Q| {
                        Distribution::mixture([
                            (alpha.clone(), &one.tab[s][0]),
                            (Q::one() - alpha, &one.tab[s][1]),
                        ])
                        .map_keys(|t| t.0)
                    };
                    let moves = vec![endpoint(&lo), endpoint(&hi)];
                    extra.push(TbNode {
                        owner: Owner::Perturber,
                        state,
                        interval: Some((lo, hi)),
                        moves,
                        reward: None,
                    });
                    Distribution::dirac(n + extra.len() - 1)
                })
                .collect(),
            count => {
                return Err(Error::TooManyActions {
                    player: format!("#{}", one.player.0),
                    state: format!("#{s}"),
                    count,
                    max: 2,
                })
            }
        };
        nodes.push(TbNode {
            owner: Owner::Deviator,
            state,
            interval: None,
            moves,
            reward: None,
        });
    }
    nodes.extend(extra);
    Ok(TurnBasedGame {
        player: one.player,
        epsilon: epsilon.clone(),
        nodes,
        num_states: n,
    })
}

impl TurnBasedGame {
    pub fn label(&self, game: &Game, node: usize) -> String {
        let nd = &self.nodes[node];
        let name = game.arena().state_name(nd.state);
        match &nd.interval {
            None => name.to_string(),
            Some((lo, hi)) => format!("{name}[{},{}]", format_rational(lo), format_rational(hi)),
        }
    }

    fn deviator_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|k| self.nodes[*k].owner == Owner::Deviator && self.nodes[*k].moves.len() > 1)
            .collect()
    }

    pub fn num_deviator_strategies(&self) -> u128 {
        self.deviator_nodes()
            .iter()
            .map(|k| self.nodes[*k].moves.len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Perturber decision process once the deviator's moves are fixed.
    fn perturber_mdp(&self, deviator: &[usize]) -> Mdp {
        Mdp {
            terminal: self.nodes.iter().map(|nd| nd.reward.clone()).collect(),
            choices: self
                .nodes
                .iter()
                .enumerate()
                .map(|(k, nd)| match nd.owner {
                    Owner::Terminal => Vec::new(),
                    Owner::Deviator => vec![nd.moves[deviator[k]].clone()],
                    Owner::Perturber => nd.moves.clone(),
                })
                .collect(),
        }
    }
}

/// Pure memoryless strategies of both sides, as move indices per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TbProfile {
    pub deviator: Vec<usize>,
    pub perturber: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeValues {
    Exact(Vec<Q>),
    /// From value iteration.
    Approx(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TbSolution {
    /// per node
    pub values: NodeValues,
    pub strategies: TbProfile,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TbMethod {
    /// Exact when the deviator has at most this many pure memoryless
    /// strategies, value iteration otherwise.
    Auto(u128),
    Exact,
    ValueIteration { tolerance: f64, max_iterations: usize },
}

impl Default for TbMethod {
    fn default() -> Self {
        TbMethod::Auto(ENUMERATION_LIMIT)
    }
}

const VI_DEFAULT: TbMethod = TbMethod::ValueIteration {
    tolerance: 1e-9,
    max_iterations: 1_000_000,
};

pub fn solve_turn_based(tbg: &TurnBasedGame) -> Result<TbSolution> {
    solve_turn_based_with(tbg, TbMethod::default())
}

pub fn solve_turn_based_with(tbg: &TurnBasedGame, method: TbMethod) -> Result<TbSolution> {
    match method {
        TbMethod::Exact => solve_exact(tbg),
        TbMethod::Auto(limit) if tbg.num_deviator_strategies() <= limit => solve_exact(tbg),
        TbMethod::Auto(_) => solve_turn_based_with(tbg, VI_DEFAULT),
        TbMethod::ValueIteration {
            tolerance,
            max_iterations,
        } => value_iteration(tbg, tolerance, max_iterations),
    }
}

/// Every deviator strategy against an exactly solved perturber. The witness
/// is the first deviator strategy that is optimal from every node.
fn solve_exact(tbg: &TurnBasedGame) -> Result<TbSolution> {
    let dev_nodes = tbg.deviator_nodes();
    let radix: Vec<usize> = dev_nodes.iter().map(|k| tbg.nodes[*k].moves.len()).collect();
    let count = tbg.num_deviator_strategies();
    let strategies: Vec<Vec<usize>> = (0..count as usize)
        .map(|mut idx| {
            let mut out = vec![0usize; tbg.nodes.len()];
            for (pos, k) in dev_nodes.iter().enumerate().rev() {
                out[*k] = idx % radix[pos];
                idx /= radix[pos];
            }
            out
        })
        .collect();
    let solved: Vec<(Vec<Q>, Vec<usize>)> = strategies
        .par_iter()
        .map(|dev| {
            let sol = tbg.perturber_mdp(dev).solve(Goal::Min, Method::PolicyIteration)?;
            Ok((sol.values, sol.policy))
        })
        .collect::<Result<_>>()?;
    let mut best = solved[0].0.clone();
    for (v, _) in &solved[1..] {
        for (b, x) in best.iter_mut().zip(v) {
            if x > b {
                *b = x.clone();
            }
        }
    }
    let score = |v: &[Q]| v.iter().zip(&best).filter(|(x, b)| x == b).count();
    let pick = (0..solved.len())
        .max_by_key(|k| (score(&solved[*k].0), std::cmp::Reverse(*k)))
        .unwrap();
    let deviator = strategies[pick].clone();
    let perturber = solved[pick].1.clone();
    Ok(TbSolution {
        values: NodeValues::Exact(best),
        strategies: TbProfile { deviator, perturber },
    })
}

fn value_iteration(tbg: &TurnBasedGame, tolerance: f64, max_iterations: usize) -> Result<TbSolution> {
    if tbg.nodes.iter().any(|nd| nd.reward.as_ref().is_some_and(Signed::is_negative)) {
        return Err(Error::NegativeRewards);
    }
    let probs: Vec<Vec<Vec<(usize, f64)>>> = tbg
        .nodes
        .iter()
        .map(|nd| {
            nd.moves
                .iter()
                .map(|d| d.entries().iter().map(|(t, p)| (*t, to_f64(p))).collect())
                .collect()
        })
        .collect();
    let mut v: Vec<f64> = tbg
        .nodes
        .iter()
        .map(|nd| nd.reward.as_ref().map_or(0.0, to_f64))
        .collect();
    let mut choice = vec![0usize; tbg.nodes.len()];
    for _ in 0..max_iterations {
        let mut delta: f64 = 0.0;
        let mut next = v.clone();
        for (k, nd) in tbg.nodes.iter().enumerate() {
            if nd.owner == Owner::Terminal {
                continue;
            }
            let scores = probs[k]
                .iter()
                .map(|m| m.iter().map(|(t, p)| p * v[*t]).sum::<f64>());
            let (c, val) = scores.enumerate().fold((0, f64::NAN), |(bc, bv), (c, x)| {
                let better = match nd.owner {
                    Owner::Deviator => x > bv,
                    _ => x < bv,
                };
                if bv.is_nan() || better {
                    (c, x)
                } else {
                    (bc, bv)
                }
            });
            choice[k] = c;
            delta = delta.max((val - v[k]).abs());
            next[k] = val;
        }
        v = next;
        if delta < tolerance {
            break;
        }
    }
    let (deviator, perturber): (Vec<usize>, Vec<usize>) = tbg
        .nodes
        .iter()
        .zip(&choice)
        .map(|(nd, c)| match nd.owner {
            Owner::Deviator => (*c, 0),
            Owner::Perturber => (0, *c),
            Owner::Terminal => (0, 0),
        })
        .unzip();
    Ok(TbSolution {
        values: NodeValues::Approx(v),
        strategies: TbProfile { deviator, perturber },
    })
}

/// `sup` over pure memoryless deviations of the `inf` over their epsilon-ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationValue {
    pub player: PlayerId,
    pub epsilon: Q,
    /// indexed by state
    pub values: Vec<Q>,
    /// a pure deviation attaining the value at as many states as possible
    pub witness: StationaryStrategy,
    /// worst case inside the witness' ball
    pub counter: StationaryStrategy,
}

impl DeviationValue {
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let ar = game.arena();
        let values: serde_json::Map<String, serde_json::Value> = ar
            .states()
            .map(|s| (ar.state_name(s).to_string(), format_rational(&self.values[s.0]).into()))
            .collect();
        json!({
            "player": ar.player_name(self.player),
            "epsilon": format_rational(&self.epsilon),
            "values": values,
            "witness": strategy_to_json(game, &self.witness),
            "counter": strategy_to_json(game, &self.counter),
        })
    }
}

/// Worst case of every pure memoryless deviation of `i` within its
/// epsilon-ball, in enumeration order, as (deviation, ball minimum, counter).
pub fn deviation_ball_minima(
    game: &Game,
    profile: &StationaryProfile,
    i: PlayerId,
    epsilon: &Q,
) -> Result<Vec<(StationaryStrategy, Vec<Q>, StationaryStrategy)>> {
    enumerate_pure_memoryless(game, i)
        .into_par_iter()
        .map(|dev| {
            let ball = BallSpec {
                center: dev.clone(),
                radius: epsilon.clone(),
            };
            let set = ConstrainedActionSet::ball(game, &ball)?;
            let br = constrained_best_response(game, profile, &set, Goal::Min)?;
            Ok((dev, br.values, br.witness))
        })
        .collect()
}

pub fn imprecise_deviation_value(
    game: &Game,
    profile: &StationaryProfile,
    i: PlayerId,
    epsilon: &Q,
) -> Result<DeviationValue> {
    let minima = deviation_ball_minima(game, profile, i, epsilon)?;
    let mut best = minima[0].1.clone();
    for (_, v, _) in &minima[1..] {
        for (b, x) in best.iter_mut().zip(v) {
            if x > b {
                *b = x.clone();
            }
        }
    }
    let score = |v: &[Q]| v.iter().zip(&best).filter(|(x, b)| x == b).count();
    let pick = (0..minima.len())
        .max_by_key(|k| (score(&minima[*k].1), std::cmp::Reverse(*k)))
        .unwrap();
    let (witness, _, counter) = minima.into_iter().nth(pick).unwrap();
    Ok(DeviationValue {
        player: i,
        epsilon: epsilon.clone(),
        values: best,
        witness,
        counter,
    })
}

/// Whether the one-step behaviour of `sigma_prime` matches what the
/// turn-based pair `profile` realizes, at every non-final state.
pub fn correspondence_check(
    one: &OnePlayerGame,
    sigma: &StationaryStrategy,
    sigma_prime: &StationaryStrategy,
    tbg: &TurnBasedGame,
    profile: &TbProfile,
) -> Result<bool> {
    if distance(sigma, sigma_prime)? > tbg.epsilon {
        return Err(Error::DistancePrecondition);
    }
    for s in 0..tbg.num_states {
        if tbg.nodes[s].owner == Owner::Terminal {
            continue;
        }
        let state = StateId(s);
        let realized = realized_step(tbg, profile, s);
        if realized != one.step(state, sigma_prime.at(state)).map_keys(|t| t.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn realized_step(tbg: &TurnBasedGame, profile: &TbProfile, s: usize) -> Distribution<usize> {
    let mv = &tbg.nodes[s].moves[profile.deviator[s]];
    match tbg.nodes[s].moves.len() {
        1 => mv.clone(),
        _ => {
            let k = mv.entries()[0].0;
            tbg.nodes[k].moves[profile.perturber[k]].clone()
        }
    }
}

/// A pair `(sigma, sigma_prime)` corresponding to a pure memoryless pair of
/// the turn-based game. `sigma_prime` plays the chosen interval endpoint;
/// `sigma` is pure where the endpoint is within epsilon of a pure choice and
/// plays the interval midpoint otherwise.
pub fn corresponding_pair(
    one: &OnePlayerGame,
    tbg: &TurnBasedGame,
    profile: &TbProfile,
) -> (StationaryStrategy, StationaryStrategy) {
    let eps = &tbg.epsilon;
    let mut sigma = Vec::with_capacity(tbg.num_states);
    let mut sigma_prime = Vec::with_capacity(tbg.num_states);
    for s in 0..tbg.num_states {
        let acts = &one.allow[s];
        if acts.len() != 2 || tbg.nodes[s].owner == Owner::Terminal {
            sigma.push(Distribution::dirac(acts[0]));
            sigma_prime.push(Distribution::dirac(acts[0]));
            continue;
        }
        let k = tbg.nodes[s].moves[profile.deviator[s]].entries()[0].0;
        let (lo, hi) = tbg.nodes[k].interval.clone().unwrap();
        let gamma = if profile.perturber[k] == 0 { lo.clone() } else { hi.clone() };
        let mix = |p: Q| {
            Distribution::new([(acts[0], p.clone()), (acts[1], Q::one() - p)]).expect("probability")
        };
        let center = if gamma <= *eps {
            Q::zero()
        } else if gamma >= Q::one() - eps {
            Q::one()
        } else {
            (lo + hi) / Q::from_integer(2.into())
        };
        sigma.push(mix(center));
        sigma_prime.push(mix(gamma));
    }
    (
        StationaryStrategy {
            player: one.player,
            choice: sigma,
        },
        StationaryStrategy {
            player: one.player,
            choice: sigma_prime,
        },
    )
}

impl TbSolution {
    /// Values at the original states.
    pub fn state_values(&self, num_states: usize) -> NodeValues {
        match &self.values {
            NodeValues::Exact(v) => NodeValues::Exact(v[..num_states].to_vec()),
            NodeValues::Approx(v) => NodeValues::Approx(v[..num_states].to_vec()),
        }
    }
}
