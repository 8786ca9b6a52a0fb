mod common;

use num::traits::Zero;

use common::random::{random_game, random_profile};
use common::r;
use imprecise_eq::deviation::{
    build_deviation_game, corresponding_pair, correspondence_check, fix_coplayers, imprecise_deviation_value,
    solve_turn_based, NodeValues,
};
use imprecise_eq::equilibrium::{
    brute_force_search, check_imprecise, check_nash, compute_equilibrium, IterationConfig, SearchKind,
};
use imprecise_eq::mdp::Goal;
use imprecise_eq::model::{Game, StateId};
use imprecise_eq::payoff::{constrained_best_response, evaluate_profile, ConstrainedActionSet};
use imprecise_eq::rational::Q;
use imprecise_eq::strategy::{enumerate_pure_memoryless, in_delta_epsilon, BallSpec, StationaryProfile};
use imprecise_eq::structure::{delta_epsilon_spec, make_cycle_free};

fn corpus() -> Vec<(Game, StationaryProfile)> {
    (0..50).map(|k| {
        let g = random_game(k);
        let p = random_profile(&g, k);
        (g, p)
    })
    .collect()
}

#[test]
fn turn_based_value_matches_ball_value() {
    for (g, p) in corpus() {
        for eps in ["1/10", "1/4"] {
            let eps = r(eps);
            for i in g.arena().players() {
                let one = fix_coplayers(&g, &p, i);
                let tbg = build_deviation_game(&one, &eps).unwrap();
                let sol = solve_turn_based(&tbg).unwrap();
                let NodeValues::Exact(v) = sol.state_values(g.arena().num_states()) else { panic!("not exact") };
                assert_eq!(v, imprecise_deviation_value(&g, &p, i, &eps).unwrap().values);

                let (sigma, sigma_prime) = corresponding_pair(&one, &tbg, &sol.strategies);
                assert!(correspondence_check(&one, &sigma, &sigma_prime, &tbg, &sol.strategies).unwrap());
            }
        }
    }
}

#[test]
fn deviation_value_is_monotone_and_bounded() {
    for (g, p) in corpus() {
        for i in g.arena().players() {
            let rewards: Vec<Q> = g.finals().map(|f| g.reward(f, i).unwrap().clone()).collect();
            let hi = rewards.iter().max().unwrap().clone().max(Q::zero());
            let lo = rewards.iter().min().unwrap().clone().min(Q::zero());
            let mut prev: Option<Vec<Q>> = None;
            for eps in ["0", "1/20", "1/10", "1/4", "1/2"] {
                let v = imprecise_deviation_value(&g, &p, i, &r(eps)).unwrap().values;
                assert!(v.iter().all(|x| &lo <= x && x <= &hi));
                if let Some(prev) = &prev {
                    assert!(v.iter().zip(prev).all(|(a, b)| a <= b));
                }
                prev = Some(v);
            }
        }
    }
}

#[test]
fn fixing_coplayers_preserves_payoffs() {
    for (g, p) in corpus() {
        let exact = evaluate_profile(&g, &p).unwrap();
        for i in g.arena().players() {
            let v = fix_coplayers(&g, &p, i).evaluate(p.get(i)).unwrap();
            for s in g.arena().states() {
                assert_eq!(&v[s.0], exact.at(i, s));
            }
        }
    }
}

/// Random, pure and grid-Nash profiles of one game.
fn candidates(g: &Game, seed: u64) -> Vec<StationaryProfile> {
    let mut out: Vec<StationaryProfile> = (0..4).map(|k| random_profile(g, seed * 10 + k)).collect();
    let players: Vec<_> = g.arena().players().map(|i| enumerate_pure_memoryless(g, i)).collect();
    for a in &players[0] {
        for b in &players[1] {
            out.push(StationaryProfile { strategies: vec![a.clone(), b.clone()] });
        }
    }
    out.extend(brute_force_search(g, &SearchKind::Nash, StateId(0), 4, u128::MAX).unwrap().into_iter().map(|(p, _)| p));
    out
}

#[test]
fn nash_implies_imprecise_and_acceptance_is_monotone() {
    let mut nash_seen = 0;
    for seed in 0..50 {
        let g = random_game(seed);
        for p in candidates(&g, seed) {
            let s0 = StateId(0);
            let nash = check_nash(&g, &p, s0).unwrap().accepted;
            let verdicts: Vec<bool> = ["0", "1/10", "1/4"]
                .iter()
                .map(|e| check_imprecise(&g, &p, s0, &r(e)).unwrap().accepted)
                .collect();
            assert_eq!(verdicts[0], nash, "seed {seed}");
            if nash {
                nash_seen += 1;
                assert!(verdicts.iter().all(|v| *v), "seed {seed}");
            }
            assert!(verdicts.windows(2).all(|w| !w[0] || w[1]), "seed {seed}");
        }
    }
    assert!(nash_seen > 0);
}

#[test]
fn rejection_witnesses_reproduce() {
    let mut rejected = 0;
    for seed in 0..30 {
        let g = random_game(seed);
        for p in candidates(&g, seed) {
            let v = check_imprecise(&g, &p, StateId(0), &r("1/10")).unwrap();
            let Some(w) = v.witness else { continue };
            rejected += 1;
            let ball = BallSpec { center: w.deviation.clone(), radius: r("1/10") };
            let set = ConstrainedActionSet::ball(&g, &ball).unwrap();
            let min = constrained_best_response(&g, &p, &set, Goal::Min).unwrap();
            assert_eq!(min.values[0], w.deviation_value);
            assert!(w.deviation_value > w.equilibrium_value);
        }
    }
    assert!(rejected > 0);
}

#[test]
fn computed_equilibria_are_constrained() {
    for seed in 0..15 {
        let g = random_game(seed);
        let eps = r("1/10");
        let c = compute_equilibrium(&g, &eps, StateId(0), &IterationConfig::default()).unwrap();
        assert_eq!(c.verdict, check_imprecise(&g, &c.profile, StateId(0), &eps).unwrap());
        if c.verdict.accepted {
            let reduced = make_cycle_free(&g).unwrap().game;
            let spec = delta_epsilon_spec(&reduced, &eps).unwrap();
            assert!(in_delta_epsilon(&c.profile, &spec).unwrap(), "seed {seed}");
        }
    }
}
