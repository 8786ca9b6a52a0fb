// The three equilibrium checkers on one profile: accepted as an
// epsilon-Nash equilibrium, rejected under imprecise deviations.

use imprecise_eq::equilibrium::{check_epsilon_nash, check_imprecise, check_nash};
use imprecise_eq::model::parse_game;
use imprecise_eq::rational::{format_rational, q};
use imprecise_eq::strategy::parse_profile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let game = parse_game(&std::fs::read_to_string(format!("{dir}/fig3.json"))?)?;
    let profile = parse_profile(&game, &std::fs::read_to_string(format!("{dir}/profiles/fig3-eps.json"))?)?;
    let s = game.arena().state_id("s")?;
    let eps = q(1, 10);

    let verdicts = [
        check_nash(&game, &profile, s)?,
        check_epsilon_nash(&game, &profile, s, &eps)?,
        check_imprecise(&game, &profile, s, &eps)?,
    ];
    for v in &verdicts {
        let margins: Vec<String> = v.margins.iter().map(format_rational).collect();
        println!("{:<10} accepted={} margins={margins:?}", v.kind.name(), v.accepted);
    }

    // the rejection comes with a deviation whose whole ball is profitable
    if let Some(w) = &verdicts[2].witness {
        println!("{}", serde_json::to_string_pretty(&verdicts[2].to_json(&game))?);
        println!(
            "{} deviates: worst case in the ball {} > {}",
            game.arena().player_name(w.player),
            format_rational(&w.deviation_value),
            format_rational(&w.equilibrium_value)
        );
    }
    Ok(())
}
