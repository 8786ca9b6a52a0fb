//! Structural analysis: cycling states, strong components and the exiting
//! actions that every equilibrium candidate must play with probability at
//! least epsilon.

use std::collections::{BTreeMap, BTreeSet};

use num::traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{ActionId, Distribution, Game, PlayerId, StateId};
use crate::rational::{format_rational, Q};
use crate::strategy::{product, DeltaEpsilonSpec, StationaryProfile};

pub const DEFAULT_COMPONENT_CAP: usize = 12;

/// Per-player action supports at one state.
pub type ProductSupport = Vec<Vec<ActionId>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongComponent {
    pub states: BTreeSet<StateId>,
    /// Each stabilizer assigns a closed product support to every state of the
    /// component, in the order of `states`. Only maximal supports are listed.
    pub stabilizers: Vec<Vec<ProductSupport>>,
}

impl StrongComponent {
    fn position(&self, s: StateId) -> Option<usize> {
        self.states.iter().position(|t| *t == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationBound {
    pub k: usize,
    pub p: Q,
}

/// Cycling states together with a joint action witnessing the condition:
/// every unilateral deviation from it keeps play among cycling states.
pub fn cycling_witnesses(game: &Game) -> BTreeMap<StateId, Vec<ActionId>> {
    let ar = game.arena();
    let mut inside: Vec<bool> = ar.states().map(|s| !game.is_final(s)).collect();
    loop {
        let mut witness = BTreeMap::new();
        let mut changed = false;
        for s in ar.states() {
            if !inside[s.0] {
                continue;
            }
            let found = (0..ar.num_joint_actions(s))
                .map(|idx| ar.joint_action(s, idx))
                .find(|joint| keeps_inside(game, s, joint, &inside));
            match found {
                Some(j) => {
                    witness.insert(s, j);
                }
                None => {
                    inside[s.0] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return witness;
        }
    }
}

fn keeps_inside(game: &Game, s: StateId, joint: &[ActionId], inside: &[bool]) -> bool {
    let ar = game.arena();
    ar.players().all(|i| {
        ar.allow(s, i).iter().all(|b| {
            let mut dev = joint.to_vec();
            dev[i.0] = *b;
            ar.successors(s, &dev).unwrap().support().all(|t| inside[t.0])
        })
    })
}

pub fn cycling_states(game: &Game) -> BTreeSet<StateId> {
    cycling_witnesses(game).into_keys().collect()
}

/// A game whose cycling states have been turned into 0-reward finals. State
/// ids are unchanged, so the state mapping is the identity.
#[derive(Clone, Debug)]
pub struct CycleFree {
    pub game: Game,
    /// Collapsed states with the joint action played there when lifting.
    pub collapsed: BTreeMap<StateId, Vec<ActionId>>,
}

impl CycleFree {
    pub fn mapping(&self, s: StateId) -> StateId {
        s
    }
}

pub fn make_cycle_free(game: &Game) -> Result<CycleFree> {
    let collapsed = cycling_witnesses(game);
    let zeros = vec![Q::zero(); game.arena().num_players()];
    let game = if collapsed.is_empty() {
        game.clone()
    } else {
        game.collapse_to_finals(&collapsed.keys().map(|s| (*s, zeros.clone())).collect())?
    };
    Ok(CycleFree { game, collapsed })
}

/// Profile on the original game: the reduced profile outside collapsed
/// states, the cycling witness inside them.
pub fn lift_profile(reduced: &StationaryProfile, reduction: &CycleFree) -> StationaryProfile {
    let mut out = reduced.clone();
    for (s, joint) in &reduction.collapsed {
        for (i, a) in joint.iter().enumerate() {
            out.strategies[i].choice[s.0] = Distribution::dirac(*a);
        }
    }
    out
}

fn ensure_cycle_free(game: &Game) -> Result<()> {
    let cyc = cycling_states(game);
    if cyc.is_empty() {
        Ok(())
    } else {
        Err(Error::NotCycleFree(
            cyc.iter().map(|s| game.arena().state_name(*s).to_string()).collect(),
        ))
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

/// Maximal product supports at `s` all of whose joint actions stay in `set`.
fn maximal_closed_supports(game: &Game, s: StateId, set: &[bool]) -> Vec<ProductSupport> {
    let ar = game.arena();
    let options: Vec<Vec<Vec<ActionId>>> = ar.players().map(|i| nonempty_subsets(ar.allow(s, i))).collect();
    let closed: Vec<ProductSupport> = product(&options)
        .into_iter()
        .filter(|sup| {
            let refs: Vec<&[ActionId]> = sup.iter().map(Vec::as_slice).collect();
            let mut ok = true;
            ar.for_each_joint(s, &refs, |_, d| ok &= d.support().all(|t| set[t.0]));
            ok
        })
        .collect();
    let contains = |big: &ProductSupport, small: &ProductSupport| {
        big.iter().zip(small).all(|(b, sm)| sm.iter().all(|a| b.contains(a)))
    };
    closed
        .iter()
        .filter(|sup| !closed.iter().any(|other| other != *sup && contains(other, sup)))
        .cloned()
        .collect()
}

fn strongly_connected(game: &Game, states: &[StateId], supports: &[&ProductSupport]) -> bool {
    let ar = game.arena();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: BTreeMap<StateId, _> = states.iter().map(|s| (*s, graph.add_node(()))).collect();
    for (s, sup) in states.iter().zip(supports) {
        let refs: Vec<&[ActionId]> = sup.iter().map(Vec::as_slice).collect();
        ar.for_each_joint(*s, &refs, |_, d| {
            for t in d.support() {
                graph.add_edge(nodes[s], nodes[&t], ());
            }
        });
    }
    tarjan_scc(&graph).len() == 1
}

/// All strong components, found by checking every subset of states. Final
/// states only appear as singletons.
pub fn strong_components(game: &Game, cap: usize) -> Result<Vec<StrongComponent>> {
    let ar = game.arena();
    let n = ar.num_states();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "states for strong-component search",
            count: n as u128,
            limit: cap as u128,
        });
    }
    let non_finals: Vec<StateId> = game.non_finals().collect();
    let mut out: Vec<StrongComponent> = game
        .finals()
        .map(|f| StrongComponent {
            states: BTreeSet::from([f]),
            stabilizers: vec![vec![ar.players().map(|i| ar.allow(f, i).to_vec()).collect()]],
        })
        .collect();
    let found: Vec<Option<StrongComponent>> = (1u64..(1 << non_finals.len()))
        .into_par_iter()
        .map(|mask| {
            let states: Vec<StateId> = non_finals
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, s)| *s)
                .collect();
            let mut set = vec![false; n];
            for s in &states {
                set[s.0] = true;
            }
            let per_state: Vec<Vec<ProductSupport>> = states
                .iter()
                .map(|s| maximal_closed_supports(game, *s, &set))
                .collect();
            if per_state.iter().any(Vec::is_empty) {
                return None;
            }
            let stabilizers: Vec<Vec<ProductSupport>> = product(&per_state)
                .into_iter()
                .filter(|combo| strongly_connected(game, &states, &combo.iter().collect::<Vec<_>>()))
                .collect();
            (!stabilizers.is_empty()).then(|| StrongComponent {
                states: states.into_iter().collect(),
                stabilizers,
            })
        })
        .collect();
    out.extend(found.into_iter().flatten());
    out.sort_by(|a, b| a.states.cmp(&b.states));
    Ok(out)
}

/// Exiting actions of `c` as `(player, state, action)` triples.
pub fn exit_actions(game: &Game, c: &StrongComponent) -> Result<BTreeSet<(PlayerId, StateId, ActionId)>> {
    let ar = game.arena();
    if c.stabilizers.is_empty() || c.stabilizers.iter().any(|st| st.len() != c.states.len()) {
        return Err(Error::NotStrongComponent);
    }
    let mut out = BTreeSet::new();
    for stab in &c.stabilizers {
        for s in &c.states {
            let sup = &stab[c.position(*s).unwrap()];
            for i in ar.players() {
                for a in ar.allow(*s, i) {
                    let mut dev: Vec<&[ActionId]> = sup.iter().map(Vec::as_slice).collect();
                    let single = [*a];
                    dev[i.0] = &single;
                    let mut leaves = false;
                    ar.for_each_joint(*s, &dev, |_, d| leaves |= d.support().any(|t| !c.states.contains(&t)));
                    if leaves {
                        out.insert((i, *s, *a));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_epsilon(game: &Game, epsilon: &Q) -> Result<()> {
    let max = Q::new(1.into(), (game.arena().num_actions() as i64).into());
    if *epsilon <= Q::zero() || *epsilon > max {
        return Err(Error::EpsilonOutOfRange {
            epsilon: format_rational(epsilon),
            max: format_rational(&max),
        });
    }
    Ok(())
}

pub fn delta_epsilon_spec(game: &Game, epsilon: &Q) -> Result<DeltaEpsilonSpec> {
    delta_epsilon_spec_with_cap(game, epsilon, DEFAULT_COMPONENT_CAP)
}

pub fn delta_epsilon_spec_with_cap(game: &Game, epsilon: &Q, cap: usize) -> Result<DeltaEpsilonSpec> {
    ensure_cycle_free(game)?;
    check_epsilon(game, epsilon)?;
    let mut constraints = BTreeSet::new();
    for c in strong_components(game, cap)? {
        constraints.extend(exit_actions(game, &c)?);
    }
    Ok(DeltaEpsilonSpec {
        epsilon: epsilon.clone(),
        constraints,
    })
}

/// `k = |States|`, `p = 1 - (epsilon * tau)^|States|` with `tau` the smallest
/// positive transition probability.
pub fn termination_bound(game: &Game, epsilon: &Q) -> Result<TerminationBound> {
    ensure_cycle_free(game)?;
    check_epsilon(game, epsilon)?;
    let k = game.arena().num_states();
    let base = epsilon * game.arena().min_positive_probability();
    let p = Q::one() - num::pow(base, k);
    Ok(TerminationBound { k, p })
}

/// Structure report as JSON. Delta-epsilon and termination entries are only
/// present when `epsilon` is given and the game is cycle-free.
pub fn analyze(game: &Game, epsilon: Option<&Q>, cap: usize) -> Result<serde_json::Value> {
    let ar = game.arena();
    let name = |s: &StateId| ar.state_name(*s).to_string();
    let cycling = cycling_states(game);
    let components = strong_components(game, cap)?;
    let mut comp_json = Vec::new();
    let mut exits_json = Vec::new();
    for c in &components {
        let witness: serde_json::Map<String, serde_json::Value> = c
            .states
            .iter()
            .zip(&c.stabilizers[0])
            .map(|(s, sup)| {
                let per_player: serde_json::Map<String, serde_json::Value> = ar
                    .players()
                    .map(|i| {
                        let acts: Vec<&str> = sup[i.0].iter().map(|a| ar.action_name(*a)).collect();
                        (ar.player_name(i).to_string(), json!(acts))
                    })
                    .collect();
                (name(s), per_player.into())
            })
            .collect();
        let states: Vec<String> = c.states.iter().map(name).collect();
        comp_json.push(json!({ "states": states, "stabilizer": witness }));
        let exits: Vec<_> = exit_actions(game, c)?
            .into_iter()
            .map(|(i, s, a)| json!({ "player": ar.player_name(i), "state": name(&s), "action": ar.action_name(a) }))
            .collect();
        exits_json.push(json!({ "component": states, "exits": exits }));
    }
    let mut report = json!({
        "cycling_states": cycling.iter().map(name).collect::<Vec<_>>(),
        "strong_components": comp_json,
        "exit_actions": exits_json,
    });
    if let (Some(eps), true) = (epsilon, cycling.is_empty()) {
        let spec = delta_epsilon_spec_with_cap(game, eps, cap)?;
        let tb = termination_bound(game, eps)?;
        report["delta_epsilon"] = json!({
            "epsilon": format_rational(eps),
            "constraints": spec.constraints.iter().map(|(i, s, a)| json!({
                "player": ar.player_name(*i), "state": name(s), "action": ar.action_name(*a)
            })).collect::<Vec<_>>(),
        });
        report["termination_bound"] = json!({ "k": tb.k, "p": format_rational(&tb.p) });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_game;

    const LOOP: &str = r#"{
      "states": ["u", "v", "f"], "players": ["p"], "actions": ["x"],
      "allow": {"u": {"p": ["x"]}, "v": {"p": ["x"]}, "f": {"p": ["x"]}},
      "tab": {"u": {"x": [["v", "1"]]}, "v": {"x": [["u", "1"]]}, "f": {"x": [["f", "1"]]}},
      "finals": ["f"], "rewards": {"f": {"p": "1"}}
    }"#;

    #[test]
    fn closed_cycle_is_cycling() {
        let g = parse_game(LOOP).unwrap();
        assert_eq!(cycling_states(&g), BTreeSet::from([StateId(0), StateId(1)]));
        let cf = make_cycle_free(&g).unwrap();
        assert!(cycling_states(&cf.game).is_empty());
        assert!(cf.game.is_final(StateId(0)) && cf.game.is_final(StateId(1)));
        let comps = strong_components(&g, 12).unwrap();
        let sets: Vec<Vec<usize>> = comps.iter().map(|c| c.states.iter().map(|s| s.0).collect()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![2]]);
        assert!(exit_actions(&g, &comps[1]).unwrap().is_empty());
    }

    #[test]
    fn cap_and_epsilon_errors() {
        let g = parse_game(LOOP).unwrap();
        assert!(matches!(strong_components(&g, 2), Err(Error::CapExceeded { .. })));
        assert!(matches!(delta_epsilon_spec(&g, &Q::one()), Err(Error::NotCycleFree(_))));
        let cf = make_cycle_free(&g).unwrap();
        assert!(matches!(
            delta_epsilon_spec(&cf.game, &Q::new(2.into(), 1.into())),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(delta_epsilon_spec(&cf.game, &Q::one()).unwrap().constraints.is_empty());
    }
}
