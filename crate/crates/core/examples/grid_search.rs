// Brute force over a probability grid: no Nash equilibrium of hide-or-run
// shows up, while equilibria under imprecise deviations do.

use imprecise_eq::equilibrium::{brute_force_search, SearchKind, DEFAULT_SEARCH_CAP};
use imprecise_eq::model::parse_game;
use imprecise_eq::rational::{format_rational, q};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hide-or-run.json");
    let game = parse_game(&std::fs::read_to_string(path)?)?;
    let s0 = game.arena().state_id("s0")?;

    let nash = brute_force_search(&game, &SearchKind::Nash, s0, 20, DEFAULT_SEARCH_CAP)?;
    println!("Nash profiles on the 1/20 grid: {}", nash.len());

    let found = brute_force_search(&game, &SearchKind::Imprecise(q(1, 10)), s0, 10, DEFAULT_SEARCH_CAP)?;
    println!("imprecise equilibria on the 1/10 grid: {}", found.len());
    for (p, payoffs) in found.iter().take(5) {
        let u: Vec<String> = payoffs.iter().map(format_rational).collect();
        println!("  {} -> {u:?}", serde_json::to_string(&imprecise_eq::strategy::profile_to_json(&game, p))?);
    }
    Ok(())
}
