//! Existential-theory-of-the-reals encoding of constrained equilibrium
//! existence, with optional dispatch to an SMT solver.
//!
//! One formula is produced per [`SupportGuess`]; the disjunction over all
//! guesses is the full query.

pub mod formula;
pub mod smtmodel;
pub mod solver;
pub mod term;

use std::collections::BTreeMap;

use num::traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

pub use formula::{
    emit_formula, shift_rewards, spoil_set, Bounds, EtrFormula, GuessSpace, PerturberMode, Skeleton,
    SupportGuess, VarMeaning, DEFAULT_GUESS_CAP,
};
pub use solver::{run_solver, SatResult, SolverConfig, DEFAULT_SOLVER};

use crate::equilibrium::{check_imprecise, EquilibriumVerdict};
use crate::error::{Error, Result};
use crate::model::{Distribution, Game, StateId};
use crate::rational::{format_rational, rationalize, Q};
use crate::strategy::{profile_to_json, project_to_delta_epsilon, DeltaEpsilonSpec, StationaryProfile};
use crate::structure::{delta_epsilon_spec, lift_profile, make_cycle_free, CycleFree};

const MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct EtrQuery {
    pub epsilon: Q,
    pub s0: StateId,
    /// In the units of the input game.
    pub bounds: Bounds,
    pub mode: PerturberMode,
    pub cap: u128,
    pub delta_epsilon: bool,
}

impl EtrQuery {
    pub fn new(epsilon: Q, s0: StateId, bounds: Bounds) -> Self {
        EtrQuery {
            epsilon,
            s0,
            bounds,
            mode: PerturberMode::default(),
            cap: DEFAULT_GUESS_CAP,
            delta_epsilon: true,
        }
    }
}

/// The cycle-free, nonnegative game the formulas are stated over.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub reduction: CycleFree,
    pub game: Game,
    pub shift: Q,
    pub spec: Option<DeltaEpsilonSpec>,
    pub bounds: Bounds,
}

pub fn prepare(game: &Game, query: &EtrQuery) -> Result<Prepared> {
    let reduction = make_cycle_free(game)?;
    let spec = if query.delta_epsilon {
        Some(delta_epsilon_spec(&reduction.game, &query.epsilon)?)
    } else {
        None
    };
    let (shifted, shift) = shift_rewards(&reduction.game)?;
    let bounds = query
        .bounds
        .iter()
        .map(|b| b.as_ref().map(|(lo, hi)| (lo + &shift, hi + &shift)))
        .collect();
    Ok(Prepared { reduction, game: shifted, shift, spec, bounds })
}

pub fn guesses(prepared: &Prepared, query: &EtrQuery) -> Result<GuessSpace> {
    GuessSpace::new(&prepared.game, &query.epsilon, prepared.spec.as_ref(), query.mode, query.cap)
}

pub fn formula_for(prepared: &Prepared, query: &EtrQuery, guess: &SupportGuess) -> Result<EtrFormula> {
    emit_formula(&prepared.game, &query.epsilon, query.s0, &prepared.bounds, prepared.spec.as_ref(), guess)
}

/// Profile read off a model: rationalized, renormalized, projected into
/// the constrained set and lifted back to the input game.
pub fn witness_profile(
    prepared: &Prepared,
    guess: &SupportGuess,
    model: &BTreeMap<String, Q>,
) -> Result<StationaryProfile> {
    let game = &prepared.game;
    let ar = game.arena();
    let mut profile = StationaryProfile::uniform(game);
    for i in ar.players() {
        for s in ar.states() {
            let sup = &guess.supports[i.0][s.0];
            let mut probs: Vec<Q> = sup
                .iter()
                .map(|a| {
                    if sup.len() == 1 {
                        Q::one()
                    } else {
                        model
                            .get(&formula::strategy_var(i, s, *a))
                            .map(|x| rationalize(x, MAX_DENOMINATOR))
                            .unwrap_or_else(Q::zero)
                    }
                })
                .collect();
            let rest: Q = probs[1..].iter().fold(Q::zero(), |acc, x| acc + x);
            probs[0] = Q::one() - rest;
            profile.strategies[i.0].choice[s.0] = Distribution::new(sup.iter().copied().zip(probs))
                .map_err(|e| Error::Solver(format!("model is not a strategy: {e}")))?;
        }
    }
    if let Some(spec) = &prepared.spec {
        profile = project_to_delta_epsilon(game, &profile, spec)?;
    }
    Ok(lift_profile(&profile, &prepared.reduction))
}

#[derive(Clone, Debug)]
pub enum EtrOutcome {
    Sat {
        guess_index: u128,
        guess: SupportGuess,
        profile: StationaryProfile,
        verdict: EquilibriumVerdict,
    },
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct EtrReport {
    pub outcome: EtrOutcome,
    pub shift: Q,
    pub guesses_total: u128,
    pub guesses_tried: usize,
    /// Satisfiable guesses whose witness failed the exact check.
    pub rejected_witnesses: usize,
}

impl EtrReport {
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let mut out = json!({
            "shift": format_rational(&self.shift),
            "guesses_total": self.guesses_total.to_string(),
            "guesses_tried": self.guesses_tried,
            "rejected_witnesses": self.rejected_witnesses,
        });
        match &self.outcome {
            EtrOutcome::Sat { guess_index, guess, profile, verdict } => {
                out["result"] = json!("sat");
                out["guess_index"] = json!(guess_index.to_string());
                out["guess"] = guess.to_json(game);
                out["profile"] = profile_to_json(game, profile);
                out["verdict"] = verdict.to_json(game);
            }
            EtrOutcome::Unsat => out["result"] = json!("unsat"),
            EtrOutcome::Unknown(why) => {
                out["result"] = json!("unknown");
                out["reason"] = json!(why);
            }
        }
        out
    }
}

/// Dispatches every guess in batches, in parallel within a batch, and
/// reports the lowest-indexed satisfiable guess whose witness passes the
/// exact check on the input game.
pub fn solve(game: &Game, query: &EtrQuery, cfg: &SolverConfig) -> Result<EtrReport> {
    if !cfg.available() {
        return Err(Error::Solver(format!("solver not found: {}", cfg.command.join(" "))));
    }
    let prepared = prepare(game, query)?;
    let mut space = guesses(&prepared, query)?;
    let guesses_total = space.total();
    let batch = 2 * rayon::current_num_threads().max(1);
    let mut tried = 0;
    let mut rejected = 0;
    let mut unknown: Option<String> = None;
    loop {
        let chunk: Vec<(u128, SupportGuess)> = space.by_ref().take(batch).collect();
        if chunk.is_empty() {
            break;
        }
        tried += chunk.len();
        let results = chunk
            .par_iter()
            .map(|(_, g)| run_solver(cfg, &formula_for(&prepared, query, g)?.to_smtlib()))
            .collect::<Result<Vec<_>>>()?;
        for ((idx, guess), res) in chunk.into_iter().zip(results) {
            match res {
                SatResult::Sat(model) => {
                    let profile = witness_profile(&prepared, &guess, &model)?;
                    let verdict = check_imprecise(game, &profile, query.s0, &query.epsilon)?;
                    let in_bounds = query.bounds.iter().enumerate().all(|(i, b)| {
                        b.as_ref()
                            .is_none_or(|(lo, hi)| &verdict.payoffs[i] >= lo && &verdict.payoffs[i] <= hi)
                    });
                    if verdict.accepted && in_bounds {
                        return Ok(EtrReport {
                            outcome: EtrOutcome::Sat { guess_index: idx, guess, profile, verdict },
                            shift: prepared.shift,
                            guesses_total,
                            guesses_tried: tried,
                            rejected_witnesses: rejected,
                        });
                    }
                    rejected += 1;
                }
                SatResult::Unsat => {}
                SatResult::Unknown(why) => {
                    unknown.get_or_insert(why);
                }
            }
        }
    }
    let outcome = match unknown {
        Some(why) => EtrOutcome::Unknown(why),
        None if rejected > 0 => EtrOutcome::Unknown(format!("{rejected} witnesses failed the exact check")),
        None => EtrOutcome::Unsat,
    };
    Ok(EtrReport { outcome, shift: prepared.shift, guesses_total, guesses_tried: tried, rejected_witnesses: rejected })
}
