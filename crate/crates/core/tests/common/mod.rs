#![allow(dead_code)]

use std::path::PathBuf;

use imprecise_eq::model::{parse_game, Game, StateId};
use imprecise_eq::rational::{parse_rational, Q};
use imprecise_eq::strategy::{parse_profile, StationaryProfile};

pub mod random;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn game(name: &str) -> Game {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.json"))).unwrap();
    parse_game(&text).unwrap()
}

pub fn profile(game: &Game, name: &str) -> StationaryProfile {
    let text = std::fs::read_to_string(fixture_path(&format!("profiles/{name}.json"))).unwrap();
    parse_profile(game, &text).unwrap()
}

pub fn r(text: &str) -> Q {
    parse_rational(text).unwrap()
}

pub fn state(game: &Game, name: &str) -> StateId {
    game.arena().state_id(name).unwrap()
}
