// Cycling states, the cycle-free reduction, strong components and the
// constrained strategy space they induce.

use imprecise_eq::model::parse_game;
use imprecise_eq::rational::{format_rational, q};
use imprecise_eq::structure::{
    analyze, cycling_states, delta_epsilon_spec, make_cycle_free, strong_components, termination_bound,
    DEFAULT_COMPONENT_CAP,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/cycling-trap.json");
    let game = parse_game(&std::fs::read_to_string(path)?)?;
    let ar = game.arena();
    let eps = q(1, 10);

    let cycling: Vec<&str> = cycling_states(&game).iter().map(|s| ar.state_name(*s)).collect();
    println!("cycling states: {cycling:?}");

    let reduced = make_cycle_free(&game)?;
    for (s, joint) in &reduced.collapsed {
        let acts: Vec<&str> = joint.iter().map(|a| ar.action_name(*a)).collect();
        println!("collapsed {} (witness {})", ar.state_name(*s), acts.join(","));
    }

    let g = &reduced.game;
    for c in strong_components(g, DEFAULT_COMPONENT_CAP)? {
        let names: Vec<&str> = c.states.iter().map(|s| ar.state_name(*s)).collect();
        println!("strong component {names:?}, {} stabilizer(s)", c.stabilizers.len());
    }
    let spec = delta_epsilon_spec(g, &eps)?;
    for (i, s, a) in &spec.constraints {
        println!("  {} must play {} at {} with probability >= 1/10", ar.player_name(*i), ar.action_name(*a), ar.state_name(*s));
    }
    let bound = termination_bound(g, &eps)?;
    println!("absorbed within {} steps with probability >= 1 - {}", bound.k, format_rational(&bound.p));

    // the same report as the `analyze` subcommand prints
    println!("{}", serde_json::to_string_pretty(&analyze(&game, Some(&eps), DEFAULT_COMPONENT_CAP)?)?);
    Ok(())
}
