// Load a game from JSON, inspect it, and see what validation rejects.

use imprecise_eq::model::{parse_game, serialize_game};
use imprecise_eq::rational::format_rational;

const MATCHING: &str = r#"{
  "states": ["s", "same", "diff"],
  "players": ["row", "col"],
  "actions": ["h", "t"],
  "allow": {
    "s": { "row": ["h", "t"], "col": ["h", "t"] },
    "same": { "row": ["h"], "col": ["h"] },
    "diff": { "row": ["h"], "col": ["h"] }
  },
  "tab": {
    "s": {
      "h,h": [["same", "1"]], "t,t": [["same", "1"]],
      "h,t": [["diff", "1"]], "t,h": [["diff", "1/2"], ["s", "1/2"]]
    },
    "same": { "h,h": [["same", "1"]] },
    "diff": { "h,h": [["diff", "1"]] }
  },
  "finals": ["same", "diff"],
  "rewards": {
    "same": { "row": "1", "col": "-1" },
    "diff": { "row": "-1", "col": "1" }
  }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let game = parse_game(MATCHING)?;
    let ar = game.arena();
    println!("{} states, {} players, {} actions", ar.num_states(), ar.num_players(), ar.num_actions());
    for s in game.non_finals() {
        for (joint, dist) in ar.rows(s) {
            let names: Vec<&str> = joint.iter().map(|a| ar.action_name(*a)).collect();
            let succ: Vec<String> = dist
                .entries()
                .iter()
                .map(|(t, p)| format!("{}:{}", ar.state_name(*t), format_rational(p)))
                .collect();
            println!("  {} --{}--> {}", ar.state_name(s), names.join(","), succ.join(" "));
        }
    }
    for f in game.finals() {
        let r: Vec<String> = game.rewards(f).unwrap().iter().map(format_rational).collect();
        println!("  final {} pays ({})", ar.state_name(f), r.join(", "));
    }

    // serialization is lossless
    let again = parse_game(&serialize_game(&game))?;
    assert_eq!(serialize_game(&again), serialize_game(&game));

    // rows that do not sum to one are rejected
    let broken = MATCHING.replace(r#"[["diff", "1/2"], ["s", "1/2"]]"#, r#"[["diff", "1/2"]]"#);
    match parse_game(&broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
