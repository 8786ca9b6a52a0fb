// The command-line front end called as a library function.

use imprecise_eq::cli;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let game = format!("{dir}/quit-loop.json");
    let profile = format!("{dir}/profiles/quit-loop-eps.json");
    let runs: [Vec<&str>; 3] = [
        vec!["validate", "--game", &game],
        vec!["eval", "--game", &game, "--profile", &profile, "--state", "1", "--format", "csv"],
        vec!["value", "--game", &game, "--profile", &profile, "--player", "p2", "--epsilon", "1/10"],
    ];
    for args in runs {
        let out = cli::run(std::iter::once("impeq").chain(args.iter().copied()));
        println!("$ impeq {}  (exit {})", args.join(" "), out.code);
        print!("{}{}", out.stdout, out.stderr);
        if out.code != 0 {
            return Err(format!("exit {}", out.code).into());
        }
    }
    Ok(())
}
