// Existential real-arithmetic formulas, one per support guess, and an
// optional run through an SMT solver on PATH.

use imprecise_eq::etr::{self, EtrOutcome, EtrQuery, SolverConfig};
use imprecise_eq::model::parse_game;
use imprecise_eq::rational::{format_rational, q, qi};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hide-or-run.json");
    let game = parse_game(&std::fs::read_to_string(path)?)?;
    let s0 = game.arena().state_id("s0")?;

    // p1 gets between -1 and -1/2
    let query = EtrQuery::new(q(1, 10), s0, vec![Some((qi(-1), q(-1, 2))), None]);
    let prepared = etr::prepare(&game, &query)?;
    println!("rewards shifted by {}", format_rational(&prepared.shift));

    let space = etr::guesses(&prepared, &query)?;
    println!("{} support guesses", space.total());
    for (idx, guess) in space.take(3) {
        let f = etr::formula_for(&prepared, &query, &guess)?;
        println!(
            "guess {idx}: {} assertions, {} terms, nonlinear={}",
            f.assertion_count(),
            f.term_count(),
            f.is_nonlinear()
        );
        if idx == 0 {
            print!("{}", f.to_smtlib());
        }
    }

    let cfg = SolverConfig::default();
    if !cfg.available() {
        println!("no solver on PATH, stopping here");
        return Ok(());
    }
    let report = etr::solve(&game, &query, &cfg)?;
    match &report.outcome {
        EtrOutcome::Sat { guess_index, verdict, .. } => {
            println!("sat at guess {guess_index}, witness accepted={}", verdict.accepted)
        }
        other => println!("{other:?}"),
    }
    println!("{}", serde_json::to_string_pretty(&report.to_json(&game))?);
    Ok(())
}
