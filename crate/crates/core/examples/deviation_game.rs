// The turn-based deviation game of one player: the deviator picks an
// interval of probabilities, a perturber picks the point.

use imprecise_eq::deviation::{
    build_deviation_game, fix_coplayers, imprecise_deviation_value, solve_turn_based, NodeValues, Owner,
};
use imprecise_eq::model::parse_game;
use imprecise_eq::rational::{format_rational, q};
use imprecise_eq::strategy::parse_profile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let game = parse_game(&std::fs::read_to_string(format!("{dir}/hide-or-run.json"))?)?;
    let profile = parse_profile(&game, &std::fs::read_to_string(format!("{dir}/profiles/hide-or-run-eq.json"))?)?;
    let eps = q(1, 10);
    let p2 = game.arena().player_id("p2")?;

    let one = fix_coplayers(&game, &profile, p2);
    let tbg = build_deviation_game(&one, &eps)?;
    println!("{} nodes, {} deviator strategies", tbg.nodes.len(), tbg.num_deviator_strategies());
    for (k, node) in tbg.nodes.iter().enumerate() {
        let owner = match node.owner {
            Owner::Deviator => "deviator",
            Owner::Perturber => "perturber",
            Owner::Terminal => "terminal",
        };
        println!("  {k:>2} {:<24} {owner:<9} {} move(s)", tbg.label(&game, k), node.moves.len());
    }

    let sol = solve_turn_based(&tbg)?;
    let ball = imprecise_deviation_value(&game, &profile, p2, &eps)?;
    if let NodeValues::Exact(v) = sol.state_values(game.arena().num_states()) {
        for s in game.arena().states() {
            println!(
                "  value at {}: turn-based {} / ball {}",
                game.arena().state_name(s),
                format_rational(&v[s.0]),
                format_rational(&ball.values[s.0])
            );
        }
    }
    Ok(())
}
