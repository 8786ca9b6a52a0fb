mod common;

use num::traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random::{random_game, random_profile};
use common::{game, profile, r, state};
use imprecise_eq::etr::shift_rewards;
use imprecise_eq::mdp::Goal;
use imprecise_eq::model::{Game, StateId};
use imprecise_eq::payoff::{
    absorption_probability, bounded_horizon_payoff, constrained_best_response, evaluate_profile,
    monte_carlo_estimate, step_distribution, zero_reach_states, ConstrainedActionSet,
};
use imprecise_eq::rational::{to_f64, Q};
use imprecise_eq::strategy::{
    enumerate_pure_memoryless, in_delta_epsilon, project_to_delta_epsilon, BallSpec, StationaryProfile,
};
use imprecise_eq::structure::{
    cycling_states, delta_epsilon_spec, lift_profile, make_cycle_free, strong_components, termination_bound,
    DEFAULT_COMPONENT_CAP,
};

fn corpus(n: u64) -> Vec<(Game, StationaryProfile)> {
    (0..n).map(|k| {
        let g = random_game(k);
        let p = random_profile(&g, k);
        (g, p)
    })
    .collect()
}

#[test]
fn bellman_identity_holds_exactly() {
    for (g, p) in corpus(50) {
        let v = evaluate_profile(&g, &p).unwrap();
        let zero = zero_reach_states(&g, &p);
        for i in g.arena().players() {
            for s in g.arena().states() {
                let here = v.at(i, s);
                if let Some(rw) = g.reward(s, i) {
                    assert_eq!(here, rw);
                } else if zero.contains(&s) {
                    assert!(here.is_zero());
                } else {
                    let next: Q = step_distribution(&g, &p, s)
                        .entries()
                        .iter()
                        .map(|(t, q)| q * v.at(i, *t))
                        .sum();
                    assert_eq!(here, &next);
                }
            }
        }
    }
}

#[test]
fn bounded_horizon_increases_to_the_exact_value() {
    for (g, p) in corpus(30) {
        let (g, _) = shift_rewards(&g).unwrap();
        let exact = evaluate_profile(&g, &p).unwrap();
        let mut prev = bounded_horizon_payoff(&g, &p, 0);
        for h in 1..=40 {
            let cur = bounded_horizon_payoff(&g, &p, h);
            for i in g.arena().players() {
                for s in g.arena().states() {
                    assert!(cur.at(i, s) >= prev.at(i, s));
                    assert!(cur.at(i, s) <= exact.at(i, s));
                }
            }
            prev = cur;
        }
        let far = bounded_horizon_payoff(&g, &p, 400);
        for i in g.arena().players() {
            for s in g.arena().states() {
                assert!((to_f64(far.at(i, s)) - to_f64(exact.at(i, s))).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn best_response_dominates_stationary_replacements() {
    for (g, p) in corpus(10) {
        for i in g.arena().players() {
            let br = constrained_best_response(&g, &p, &ConstrainedActionSet::full_simplex(&g, i), Goal::Max).unwrap();
            for seed in 0..100 {
                let other = random_profile(&g, 1000 + seed);
                let v = evaluate_profile(&g, &p.replace(other.get(i).clone())).unwrap();
                for s in g.arena().states() {
                    assert!(&br.values[s.0] >= v.at(i, s));
                }
            }
        }
    }
}

#[test]
fn monte_carlo_interval_covers_the_exact_value() {
    let g = game("quit-loop");
    let p = profile(&g, "quit-loop-eps");
    let s0 = state(&g, "1");
    let exact = to_f64(evaluate_profile(&g, &p).unwrap().at(imprecise_eq::model::PlayerId(0), s0));
    let covered = (0..100)
        .filter(|seed| {
            let est = monte_carlo_estimate(&g, &p, s0, 2000, 400, *seed);
            (est.mean[0] - exact).abs() <= est.half_width[0]
        })
        .count();
    assert!(covered >= 90, "{covered}/100");
}

#[test]
fn ball_minimum_decreases_with_radius() {
    for (g, p) in corpus(20) {
        for i in g.arena().players() {
            for dev in enumerate_pure_memoryless(&g, i) {
                let mut prev: Option<Vec<Q>> = None;
                for eps in ["0", "1/10", "1/4", "1/2"] {
                    let ball = BallSpec { center: dev.clone(), radius: r(eps) };
                    let set = ConstrainedActionSet::ball(&g, &ball).unwrap();
                    let v = constrained_best_response(&g, &p, &set, Goal::Min).unwrap().values;
                    if let Some(prev) = &prev {
                        assert!(v.iter().zip(prev).all(|(a, b)| a <= b));
                    }
                    prev = Some(v);
                }
            }
        }
    }
}

fn structure_corpus() -> Vec<Game> {
    ["team", "hide-or-run", "quit-loop", "fig3", "cycling-trap"]
        .iter()
        .map(|n| game(n))
        .chain((0..40).map(random_game))
        .collect()
}

#[test]
fn reduction_removes_every_cycling_state() {
    for g in structure_corpus() {
        let cyc = cycling_states(&g);
        assert!(g.finals().all(|f| !cyc.contains(&f)));
        let reduced = make_cycle_free(&g).unwrap();
        assert!(cycling_states(&reduced.game).is_empty());
        assert_eq!(reduced.collapsed.keys().copied().collect::<std::collections::BTreeSet<_>>(), cyc);
        // states with no route to a final under full support
        let ar = g.arena();
        let n = ar.num_states();
        let mut reach: Vec<bool> = (0..n).map(|s| g.is_final(StateId(s))).collect();
        loop {
            let before = reach.clone();
            for s in ar.states() {
                if ar.rows(s).any(|(_, d)| d.support().any(|t| reach[t.0])) {
                    reach[s.0] = true;
                }
            }
            if before == reach {
                break;
            }
        }
        for s in ar.states() {
            if !reach[s.0] {
                assert!(cyc.contains(&s));
            }
        }
    }
}

#[test]
fn lifted_profiles_keep_payoffs_on_the_trap_game() {
    let g = game("cycling-trap");
    let reduction = make_cycle_free(&g).unwrap();
    assert!(!reduction.collapsed.is_empty());
    assert!(reduction.collapsed.contains_key(&state(&g, "u")));
    assert!(!reduction.collapsed.contains_key(&state(&g, "t")));
    for seed in 0..20 {
        let reduced = random_profile(&reduction.game, seed);
        let lifted = lift_profile(&reduced, &reduction);
        let a = evaluate_profile(&g, &lifted).unwrap();
        let b = evaluate_profile(&reduction.game, &reduced).unwrap();
        for s in g.arena().states().filter(|s| !reduction.collapsed.contains_key(s)) {
            assert_eq!(a.column(s), b.column(s));
        }
    }
}

#[test]
fn strong_components_are_closed_and_connected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in structure_corpus() {
        let ar = g.arena();
        for c in strong_components(&g, DEFAULT_COMPONENT_CAP).unwrap() {
            let order: Vec<StateId> = c.states.iter().copied().collect();
            let support = &c.stabilizers[0];
            for &start in &c.states {
                let mut seen = std::collections::BTreeSet::from([start]);
                let mut s = start;
                for _ in 0..10_000 {
                    let pos = order.iter().position(|t| *t == s).unwrap();
                    let sup: Vec<&[_]> = support[pos].iter().map(Vec::as_slice).collect();
                    let joint: Vec<_> = sup.iter().map(|a| a[rng.gen_range(0..a.len())]).collect();
                    let d = ar.successors(s, &joint).unwrap();
                    let mut x: f64 = rng.gen();
                    let mut next = d.entries()[0].0;
                    for (t, p) in d.entries() {
                        x -= to_f64(p);
                        next = *t;
                        if x < 0.0 {
                            break;
                        }
                    }
                    assert!(c.states.contains(&next), "left the component");
                    seen.insert(next);
                    s = next;
                }
                assert_eq!(seen, c.states);
            }
        }
    }
}

/// A random profile pushed into the constraint set.
fn sample_in_delta(g: &Game, spec: &imprecise_eq::strategy::DeltaEpsilonSpec, seed: u64) -> StationaryProfile {
    let raw = random_profile(g, seed);
    project_to_delta_epsilon(g, &raw, spec).unwrap()
}

#[test]
fn constraint_set_is_nonempty_and_terminates() {
    for g in structure_corpus() {
        let reduced = make_cycle_free(&g).unwrap().game;
        let max_eps = Q::new(1.into(), (reduced.arena().num_actions() as i64).into());
        let spec = delta_epsilon_spec(&reduced, &max_eps).unwrap();
        assert!(in_delta_epsilon(&StationaryProfile::uniform(&reduced), &spec).unwrap());

        let eps = r("1/10").min(max_eps);
        let spec = delta_epsilon_spec(&reduced, &eps).unwrap();
        let bound = termination_bound(&reduced, &eps).unwrap();
        assert!(bound.p.is_positive() && bound.p < Q::one());
        for seed in 0..5 {
            let p = sample_in_delta(&reduced, &spec, seed);
            for n in 1..=3 {
                let absorbed = absorption_probability(&reduced, &p, bound.k * n);
                let floor = Q::one() - num::pow(bound.p.clone(), n);
                for s in reduced.arena().states() {
                    assert!(absorbed[s.0] >= floor);
                }
            }
        }
    }
}
