//! Equilibrium checking, construction and exhaustive grid search.
//!
//! The checkers are exact and definitional. `compute_equilibrium` is a
//! damped best-response iteration inside the exiting-action polytope and
//! only ever reports what the imprecise checker says about its output.

use num::traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::deviation::deviation_ball_minima;
use crate::error::{Error, Result};
use crate::mdp::Goal;
use crate::model::{ActionId, Distribution, Game, PlayerId, StateId};
use crate::payoff::{constrained_best_response, evaluate_profile, ConstrainedActionSet};
use crate::rational::{format_rational, rationalize, to_f64, Q};
use crate::strategy::{
    in_delta_epsilon, product, project_onto_floor_simplex, profile_to_json, strategy_to_json,
    DeltaEpsilonSpec, StationaryProfile, StationaryStrategy,
};
use crate::structure::{delta_epsilon_spec, lift_profile, make_cycle_free};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Nash,
    EpsilonNash,
    Imprecise,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Nash => "nash",
            Kind::EpsilonNash => "eps-nash",
            Kind::Imprecise => "imprecise",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub player: PlayerId,
    /// pure memoryless deviation
    pub deviation: StationaryStrategy,
    /// best response value, or for imprecise checks the minimum over the
    /// deviation's ball
    pub deviation_value: Q,
    pub equilibrium_value: Q,
    /// minimizer inside the ball (imprecise checks only)
    pub counter: Option<StationaryStrategy>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumVerdict {
    pub kind: Kind,
    pub epsilon: Option<Q>,
    pub state: StateId,
    pub accepted: bool,
    /// per player at `state`
    pub payoffs: Vec<Q>,
    /// per player: equilibrium payoff minus best deviation value
    pub margins: Vec<Q>,
    pub witness: Option<Witness>,
}

impl EquilibriumVerdict {
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let ar = game.arena();
        let per_player = |v: &[Q]| -> serde_json::Value {
            ar.players()
                .map(|i| (ar.player_name(i).to_string(), format_rational(&v[i.0]).into()))
                .collect::<serde_json::Map<_, _>>()
                .into()
        };
        let witness = self.witness.as_ref().map(|w| {
            json!({
                "player": ar.player_name(w.player),
                "deviation": strategy_to_json(game, &w.deviation),
                "deviation_value": format_rational(&w.deviation_value),
                "equilibrium_value": format_rational(&w.equilibrium_value),
                "counter": w.counter.as_ref().map(|c| strategy_to_json(game, c)),
            })
        });
        json!({
            "kind": self.kind.name(),
            "epsilon": self.epsilon.as_ref().map(format_rational),
            "state": ar.state_name(self.state),
            "accepted": self.accepted,
            "payoffs": per_player(&self.payoffs),
            "margins": per_player(&self.margins),
            "witness": witness,
        })
    }
}

/// Best unilateral response value of every player at `s0`, with witness.
fn best_responses(
    game: &Game,
    profile: &StationaryProfile,
    s0: StateId,
) -> Result<Vec<(Q, StationaryStrategy)>> {
    game.arena()
        .players()
        .map(|i| {
            let set = ConstrainedActionSet::full_simplex(game, i);
            let br = constrained_best_response(game, profile, &set, Goal::Max)?;
            Ok((br.values[s0.0].clone(), br.witness))
        })
        .collect()
}

fn nash_like(
    game: &Game,
    profile: &StationaryProfile,
    s0: StateId,
    kind: Kind,
    slack: Q,
) -> Result<EquilibriumVerdict> {
    profile.validate(game)?;
    let payoffs = evaluate_profile(game, profile)?.column(s0);
    let brs = best_responses(game, profile, s0)?;
    let margins: Vec<Q> = brs.iter().zip(&payoffs).map(|((b, _), p)| p - b).collect();
    let witness = margins
        .iter()
        .enumerate()
        .filter(|(_, m)| (*m + &slack).is_negative())
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| Witness {
            player: PlayerId(i),
            deviation: brs[i].1.clone(),
            deviation_value: brs[i].0.clone(),
            equilibrium_value: payoffs[i].clone(),
            counter: None,
        });
    Ok(EquilibriumVerdict {
        kind,
        epsilon: (kind == Kind::EpsilonNash).then_some(slack),
        state: s0,
        accepted: witness.is_none(),
        payoffs,
        margins,
        witness,
    })
}

pub fn check_nash(game: &Game, profile: &StationaryProfile, s0: StateId) -> Result<EquilibriumVerdict> {
    nash_like(game, profile, s0, Kind::Nash, Q::zero())
}

pub fn check_epsilon_nash(
    game: &Game,
    profile: &StationaryProfile,
    s0: StateId,
    epsilon: &Q,
) -> Result<EquilibriumVerdict> {
    nash_like(game, profile, s0, Kind::EpsilonNash, epsilon.clone())
}

/// Accepts iff no pure memoryless deviation improves on the equilibrium
/// payoff throughout its epsilon-ball.
pub fn check_imprecise(
    game: &Game,
    profile: &StationaryProfile,
    s0: StateId,
    epsilon: &Q,
) -> Result<EquilibriumVerdict> {
    profile.validate(game)?;
    let payoffs = evaluate_profile(game, profile)?.column(s0);
    let mut margins = Vec::new();
    let mut witness: Option<Witness> = None;
    for i in game.arena().players() {
        let minima = deviation_ball_minima(game, profile, i, epsilon)?;
        let (dev, vals, counter) = minima
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1[s0.0].cmp(&b.1 .1[s0.0]).then(b.0.cmp(&a.0)))
            .map(|(_, m)| m)
            .unwrap();
        let best = &vals[s0.0];
        let margin = &payoffs[i.0] - best;
        if margin.is_negative() && witness.is_none() {
            witness = Some(Witness {
                player: i,
                deviation: dev.clone(),
                deviation_value: best.clone(),
                equilibrium_value: payoffs[i.0].clone(),
                counter: Some(counter.clone()),
            });
        }
        margins.push(margin);
    }
    Ok(EquilibriumVerdict {
        kind: Kind::Imprecise,
        epsilon: Some(epsilon.clone()),
        state: s0,
        accepted: witness.is_none(),
        payoffs,
        margins,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationConfig {
    /// weight of the best response in each update
    pub damping: Q,
    /// stop once no probability moves by more than this
    pub tolerance: f64,
    pub max_iterations: usize,
    pub check_every: usize,
    /// probabilities are rounded to this denominator after every update
    pub max_denominator: u64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            damping: Q::new(1.into(), 2.into()),
            tolerance: 1e-9,
            max_iterations: 10_000,
            check_every: 10,
            max_denominator: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub checks: usize,
    pub last_movement: f64,
    /// states collapsed by the cycle-free reduction
    pub collapsed: Vec<StateId>,
    pub delta_epsilon_constraints: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Computed {
    /// profile on the original game
    pub profile: StationaryProfile,
    /// checker verdict on the original game
    pub verdict: EquilibriumVerdict,
    pub diagnostics: Diagnostics,
}

impl Computed {
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let d = &self.diagnostics;
        json!({
            "profile": profile_to_json(game, &self.profile),
            "verdict": self.verdict.to_json(game),
            "diagnostics": {
                "iterations": d.iterations,
                "checks": d.checks,
                "last_movement": d.last_movement,
                "collapsed_states": d.collapsed.iter().map(|s| game.arena().state_name(*s)).collect::<Vec<_>>(),
                "delta_epsilon_constraints": d.delta_epsilon_constraints,
            }
        })
    }
}

/// Rounds `d` to `max_den` and projects it back above the floors of `spec`.
fn snap(
    game: &Game,
    spec: &DeltaEpsilonSpec,
    i: PlayerId,
    s: StateId,
    d: &Distribution<ActionId>,
    max_den: u64,
) -> Distribution<ActionId> {
    let acts = game.arena().allow(s, i);
    let mut x: Vec<Q> = acts.iter().map(|a| rationalize(&d.prob(*a), max_den)).collect();
    let top = (0..x.len()).max_by(|a, b| x[*a].cmp(&x[*b]).then(b.cmp(a))).unwrap();
    x[top] = Q::one() - x.iter().enumerate().filter(|(k, _)| *k != top).map(|(_, v)| v).sum::<Q>();
    let lower: Vec<Q> = acts.iter().map(|a| spec.lower_bound(i, s, *a)).collect();
    let y = project_onto_floor_simplex(&x, &lower).expect("floors are feasible");
    Distribution::new(acts.iter().copied().zip(y)).expect("projection is a distribution")
}

fn movement(a: &StationaryProfile, b: &StationaryProfile) -> f64 {
    a.strategies
        .iter()
        .zip(&b.strategies)
        .flat_map(|(x, y)| x.choice.iter().zip(&y.choice))
        .map(|(d, e)| to_f64(&crate::strategy::distribution_distance(d, e)))
        .fold(0.0, f64::max)
}

fn violation(v: &EquilibriumVerdict) -> Q {
    v.margins
        .iter()
        .map(|m| -m.clone())
        .max()
        .unwrap_or_else(Q::zero)
}

pub fn compute_equilibrium(
    game: &Game,
    epsilon: &Q,
    s0: StateId,
    config: &IterationConfig,
) -> Result<Computed> {
    let reduction = make_cycle_free(game)?;
    let g = &reduction.game;
    let spec = delta_epsilon_spec(g, epsilon)?;
    let ar = g.arena();
    let sets: Vec<ConstrainedActionSet> = ar
        .players()
        .map(|i| ConstrainedActionSet::delta_epsilon(g, i, &spec))
        .collect::<Result<_>>()?;

    let mut sigma = StationaryProfile::uniform(g);
    debug_assert!(in_delta_epsilon(&sigma, &spec)?);
    let mut best: Option<(StationaryProfile, EquilibriumVerdict)> = None;
    let (mut iterations, mut checks, mut last_movement) = (0, 0, f64::INFINITY);
    let keep = Q::one() - &config.damping;
    while iterations < config.max_iterations {
        iterations += 1;
        let responses: Vec<StationaryStrategy> = sets
            .par_iter()
            .map(|set| constrained_best_response(g, &sigma, set, Goal::Max).map(|b| b.witness))
            .collect::<Result<_>>()?;
        let mut next = sigma.clone();
        for (i, br) in responses.iter().enumerate() {
            for s in ar.states() {
                let cur = sigma.strategies[i].at(s);
                let mixed = Distribution::mixture([(keep.clone(), cur), (config.damping.clone(), br.at(s))]);
                next.strategies[i].choice[s.0] =
                    snap(g, &spec, PlayerId(i), s, &mixed, config.max_denominator);
            }
        }
        last_movement = movement(&sigma, &next);
        sigma = next;
        let converged = last_movement < config.tolerance;
        if iterations % config.check_every == 0 || converged {
            checks += 1;
            let verdict = check_imprecise(g, &sigma, s0, epsilon)?;
            let accepted = verdict.accepted;
            if best.as_ref().is_none_or(|(_, b)| violation(&verdict) < violation(b)) {
                best = Some((sigma.clone(), verdict));
            }
            if accepted || converged {
                break;
            }
        }
    }
    let reduced = match best {
        Some((p, _)) => p,
        None => sigma,
    };
    let profile = lift_profile(&reduced, &reduction);
    let verdict = check_imprecise(game, &profile, s0, epsilon)?;
    Ok(Computed {
        profile,
        verdict,
        diagnostics: Diagnostics {
            iterations,
            checks,
            last_movement,
            collapsed: reduction.collapsed.keys().copied().collect(),
            delta_epsilon_constraints: spec.constraints.len(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchKind {
    Nash,
    EpsilonNash(Q),
    Imprecise(Q),
}

pub const DEFAULT_SEARCH_CAP: u128 = 1_000_000;

/// All probability vectors over `k` actions with entries in multiples of `1/n`.
fn grid_points(k: usize, n: u32) -> Vec<Vec<Q>> {
    fn rec(k: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in (0..=left).rev() {
            prefix.push(x);
            rec(k - 1, left - x, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(k, n, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|v| v.into_iter().map(|x| Q::new(x.into(), n.into())).collect())
        .collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, j| acc.saturating_mul(n - j) / (j + 1))
}

/// Every stationary profile on the `1/grid` lattice that the chosen checker
/// accepts, with its payoffs at `s0`. Final states play their first action.
pub fn brute_force_search(
    game: &Game,
    kind: &SearchKind,
    s0: StateId,
    grid: u32,
    cap: u128,
) -> Result<Vec<(StationaryProfile, Vec<Q>)>> {
    if grid == 0 {
        return Err(Error::Invalid("grid denominator must be positive".into()));
    }
    let ar = game.arena();
    let slots: Vec<(PlayerId, StateId)> = ar
        .players()
        .flat_map(|i| game.non_finals().map(move |s| (i, s)))
        .collect();
    let count = slots
        .iter()
        .map(|(i, s)| {
            let k = ar.allow(*s, *i).len() as u128;
            binomial(grid as u128 + k - 1, k - 1)
        })
        .fold(1u128, |a, b| a.saturating_mul(b));
    if count > cap {
        return Err(Error::CapExceeded {
            what: "grid profiles",
            count,
            limit: cap,
        });
    }
    let options: Vec<Vec<Distribution<ActionId>>> = slots
        .iter()
        .map(|(i, s)| {
            let acts = ar.allow(*s, *i);
            grid_points(acts.len(), grid)
                .into_iter()
                .map(|p| Distribution::new(acts.iter().copied().zip(p)).unwrap())
                .collect()
        })
        .collect();
    let base = StationaryProfile::pure(
        game,
        &ar.players()
            .map(|i| ar.states().map(|s| ar.allow(s, i)[0]).collect())
            .collect::<Vec<_>>(),
    );
    let found: Vec<Option<(StationaryProfile, Vec<Q>)>> = product(&options)
        .into_par_iter()
        .map(|choice| {
            let mut prof = base.clone();
            for ((i, s), d) in slots.iter().zip(choice) {
                prof.strategies[i.0].choice[s.0] = d;
            }
            let verdict = match kind {
                SearchKind::Nash => check_nash(game, &prof, s0)?,
                SearchKind::EpsilonNash(e) => check_epsilon_nash(game, &prof, s0, e)?,
                SearchKind::Imprecise(e) => check_imprecise(game, &prof, s0, e)?,
            };
            Ok(verdict.accepted.then_some((prof, verdict.payoffs)))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(grid_points(2, 4).len(), 5);
        assert_eq!(grid_points(3, 2).len(), 6);
        assert_eq!(binomial(22, 1), 22);
        assert_eq!(binomial(5, 2), 10);
        for p in grid_points(3, 3) {
            assert_eq!(p.iter().sum::<Q>(), Q::one());
        }
    }
}
