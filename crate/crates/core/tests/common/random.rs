//! Seeded random games: two players, at most two actions each, a couple of
//! non-final states and two finals, probabilities with denominator at most 4.

use num::traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use imprecise_eq::model::{parse_game, Game};
use imprecise_eq::rational::Q;
use imprecise_eq::strategy::StationaryProfile;
use imprecise_eq::model::{Distribution, PlayerId};

pub fn random_game(seed: u64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let non_finals = rng.gen_range(1..=2);
    let mut states: Vec<String> = (0..non_finals).map(|k| format!("s{k}")).collect();
    states.push("f0".into());
    states.push("f1".into());
    let actions = ["a", "b"];
    let mut allow = serde_json::Map::new();
    let mut tab = serde_json::Map::new();
    for (k, s) in states.iter().enumerate() {
        let fin = k >= non_finals;
        let per: Vec<Vec<&str>> = (0..2)
            .map(|_| if fin || rng.gen_bool(0.25) { vec!["a"] } else { actions.to_vec() })
            .collect();
        allow.insert(s.clone(), serde_json::json!({ "p1": per[0], "p2": per[1] }));
        let mut rows = serde_json::Map::new();
        for x in &per[0] {
            for y in &per[1] {
                let row = if fin {
                    serde_json::json!([[s, "1"]])
                } else {
                    random_row(&mut rng, &states)
                };
                rows.insert(format!("{x},{y}"), row);
            }
        }
        let self_loop = |row: &serde_json::Value| row.as_array().is_some_and(|r| r.len() == 1 && r[0][0] == *s);
        if !fin && rows.values().all(self_loop) {
            // keep non-finals from being sinks
            let first = rows.keys().next().unwrap().clone();
            rows.insert(first, serde_json::json!([["f0", "1"]]));
        }
        tab.insert(s.clone(), rows.into());
    }
    let reward = |rng: &mut ChaCha8Rng| format!("{}/{}", rng.gen_range(-2..=4), rng.gen_range(1..=2));
    let doc = serde_json::json!({
        "states": states,
        "players": ["p1", "p2"],
        "actions": actions,
        "allow": allow,
        "tab": tab,
        "finals": ["f0", "f1"],
        "rewards": {
            "f0": { "p1": reward(&mut rng), "p2": reward(&mut rng) },
            "f1": { "p1": reward(&mut rng), "p2": reward(&mut rng) }
        }
    });
    parse_game(&doc.to_string()).unwrap_or_else(|e| panic!("seed {seed}: {e}"))
}

fn random_row(rng: &mut ChaCha8Rng, states: &[String]) -> serde_json::Value {
    let den = rng.gen_range(1..=4u32);
    let mut left = den;
    let mut row = Vec::new();
    let mut order: Vec<&String> = states.iter().collect();
    order.shuffle(rng);
    for (k, t) in order.iter().enumerate() {
        let take = if k + 1 == order.len() { left } else { rng.gen_range(0..=left) };
        if take > 0 {
            row.push(serde_json::json!([t, format!("{take}/{den}")]));
        }
        left -= take;
    }
    row.into()
}

/// Random stationary profile with probabilities in multiples of 1/4.
pub fn random_profile(game: &Game, seed: u64) -> StationaryProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut prof = StationaryProfile::uniform(game);
    let ar = game.arena();
    for i in ar.players() {
        for s in ar.states() {
            let acts = ar.allow(s, i);
            if acts.len() == 2 {
                let k = rng.gen_range(0..=4);
                let p = Q::new(k.into(), 4.into());
                let d = Distribution::new([(acts[0], p.clone()), (acts[1], Q::from_integer(1.into()) - p)]
                    .into_iter()
                    .filter(|(_, x)| !x.is_zero()))
                .unwrap();
                prof.strategies[PlayerId::index(i)].choice[s.0] = d;
            }
        }
    }
    prof
}
