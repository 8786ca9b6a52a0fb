// Exact maximal and minimal terminal-reward values of a small MDP, by
// enumeration and by policy iteration.

use imprecise_eq::mdp::{Goal, Mdp, Method};
use imprecise_eq::model::Distribution;
use imprecise_eq::rational::{format_rational, q, qi};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 0: gamble or go to 1; 1: stay forever or exit to 3; 2 pays 1, 3 pays 1/2
    let mdp = Mdp {
        terminal: vec![None, None, Some(qi(1)), Some(q(1, 2))],
        choices: vec![
            vec![Distribution::new([(2, q(2, 5)), (0, q(1, 5)), (3, q(2, 5))])?, Distribution::dirac(1)],
            vec![Distribution::dirac(1), Distribution::dirac(3)],
            vec![],
            vec![],
        ],
    };
    println!("{} pure memoryless policies", mdp.num_policies());
    for goal in [Goal::Max, Goal::Min] {
        let a = mdp.solve(goal, Method::Enumerate)?;
        let b = mdp.solve(goal, Method::PolicyIteration)?;
        assert_eq!(a.values, b.values);
        let v: Vec<String> = a.values.iter().map(format_rational).collect();
        println!("{goal:?}: values {v:?}, policy {:?}", a.policy);
    }
    Ok(())
}
