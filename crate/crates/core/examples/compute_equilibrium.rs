// Damped best-response iteration inside the constrained strategy space,
// followed by the exact checker.

use imprecise_eq::equilibrium::{compute_equilibrium, IterationConfig};
use imprecise_eq::model::parse_game;
use imprecise_eq::rational::q;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    for (name, start) in [("hide-or-run", "s0"), ("quit-loop", "1")] {
        let game = parse_game(&std::fs::read_to_string(format!("{dir}/{name}.json"))?)?;
        let s0 = game.arena().state_id(start)?;
        for eps in [q(1, 20), q(1, 10)] {
            let c = compute_equilibrium(&game, &eps, s0, &IterationConfig::default())?;
            println!(
                "{name} eps={eps}: accepted={} after {} iteration(s), {} constraint(s)",
                c.verdict.accepted, c.diagnostics.iterations, c.diagnostics.delta_epsilon_constraints
            );
            println!("{}", serde_json::to_string(&c.to_json(&game)["profile"])?);
        }
    }
    Ok(())
}
