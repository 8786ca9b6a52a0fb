// Exact payoffs of a stationary profile, truncated horizons, and a seeded
// Monte-Carlo cross-check.

use imprecise_eq::model::{parse_game, PlayerId};
use imprecise_eq::payoff::{bounded_horizon_payoff, evaluate_profile, monte_carlo_estimate};
use imprecise_eq::rational::{format_rational, to_f64};
use imprecise_eq::strategy::parse_profile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let game = parse_game(&std::fs::read_to_string(format!("{dir}/quit-loop.json"))?)?;
    let profile = parse_profile(&game, &std::fs::read_to_string(format!("{dir}/profiles/quit-loop-eps.json"))?)?;
    let s0 = game.arena().state_id("1")?;

    let exact = evaluate_profile(&game, &profile)?;
    let col: Vec<String> = exact.column(s0).iter().map(format_rational).collect();
    println!("exact payoffs at 1: {col:?}");

    for horizon in [1, 5, 20, 80] {
        let v = bounded_horizon_payoff(&game, &profile, horizon).column(s0);
        println!("  within {horizon:>2} steps: {:.6} {:.6}", to_f64(&v[0]), to_f64(&v[1]));
    }

    let est = monte_carlo_estimate(&game, &profile, s0, 50_000, 400, 42);
    for (k, name) in game.arena().player_names().iter().enumerate() {
        println!("  {name}: {:.4} +- {:.4} (exact {:.4})", est.mean[k], est.half_width[k], to_f64(exact.at(PlayerId(k), s0)));
    }
    Ok(())
}
