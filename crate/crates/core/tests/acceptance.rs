//! Acceptance suite: one line per criterion, exit status 1 on any failure,
//! 77 when the only problem is a missing SMT solver.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::traits::{One, Signed, Zero};
use serde_json::Value;

use common::random::{random_game, random_profile};
use common::{fixture_path, game, profile, r, state};
use imprecise_eq::cli;
use imprecise_eq::deviation::{build_deviation_game, fix_coplayers, imprecise_deviation_value, solve_turn_based, NodeValues};
use imprecise_eq::equilibrium::{
    brute_force_search, check_imprecise, check_nash, compute_equilibrium, IterationConfig,
    SearchKind,
};
use imprecise_eq::etr::{self, EtrOutcome, EtrQuery, SolverConfig};
use imprecise_eq::model::{Game, StateId};
use imprecise_eq::payoff::{evaluate_profile, monte_carlo_estimate};
use imprecise_eq::rational::{format_rational, to_f64, Q};
use imprecise_eq::strategy::{
    enumerate_pure_memoryless, in_delta_epsilon, parse_profile, project_to_delta_epsilon, StationaryProfile,
};
use imprecise_eq::structure::{delta_epsilon_spec, make_cycle_free, termination_bound};

enum Status {
    Pass,
    Fail(String),
    Skip(String),
}

type Outcome = Result<(), Status>;
type Criterion = (&'static str, fn() -> Outcome);

fn fail<T>(msg: impl Into<String>) -> Result<T, Status> {
    Err(Status::Fail(msg.into()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        fail(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, Status> {
    r.map_err(|e| Status::Fail(e.to_string()))
}

fn impeq(args: &[&str]) -> (i32, Value) {
    let out = cli::run(std::iter::once("impeq").chain(args.iter().copied()));
    let v = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, v)
}

fn fx(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn field(v: &Value, path: &[&str]) -> Result<Q, Status> {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    match cur.as_str() {
        Some(t) => Ok(r(t)),
        None => fail(format!("missing {path:?} in {v}")),
    }
}

fn within(t: Instant, limit: Duration) -> Outcome {
    ensure(t.elapsed() < limit, || format!("took {:?}, limit {limit:?}", t.elapsed()))
}

fn c1() -> Outcome {
    let t = Instant::now();
    let g = fx("hide-or-run.json");
    let p = fx("profiles/hide-or-run-eq.json");
    let (code, v) = impeq(&["eval", "--game", &g, "--profile", &p, "--state", "s0"]);
    ensure(code == 0, || format!("eval exit {code}"))?;
    let got = (field(&v, &["payoffs", "p1"])?, field(&v, &["payoffs", "p2"])?);
    let eps = r("1/10");
    let want = (Q::from_integer(2.into()) * &eps - Q::one(), Q::one() - Q::from_integer(2.into()) * &eps);
    ensure(got == want, || format!("payoffs {got:?}"))?;
    let (code, v) = impeq(&["check", "--game", &g, "--profile", &p, "--kind", "imprecise", "--epsilon", "1/10"]);
    ensure(code == 0 && v["accepted"] == true, || format!("check exit {code}: {v}"))?;
    within(t, Duration::from_secs(1))
}

fn quit_loop_profile(g: &Game, eps: &Q) -> StationaryProfile {
    let e = format_rational(eps);
    let rest = format_rational(&(Q::one() - eps));
    let text = format!(
        r#"{{"p1": {{"1": {{"s": "{e}", "c": "{rest}"}}, "2": {{"c": "1"}}}},
            "p2": {{"1": {{"c": "1"}}, "2": {{"s": "{e}", "c": "{rest}"}}}}}}"#
    );
    parse_profile(g, &text).unwrap()
}

fn c2() -> Outcome {
    let t = Instant::now();
    let (code, v) = impeq(&[
        "eval", "--game", &fx("quit-loop.json"), "--profile", &fx("profiles/quit-loop-eps.json"), "--state", "1",
    ]);
    ensure(code == 0, || format!("eval exit {code}"))?;
    let got = (field(&v, &["payoffs", "p1"])?, field(&v, &["payoffs", "p2"])?);
    ensure(got == (r("37/57"), r("39/57")), || format!("payoffs {got:?}"))?;
    let (code, v) = impeq(&[
        "check", "--game", &fx("quit-loop.json"), "--profile", &fx("profiles/quit-loop-eps.json"),
        "--kind", "imprecise", "--epsilon", "1/10", "--state", "1",
    ]);
    ensure(code == 0 && v["accepted"] == true, || format!("check exit {code}: {v}"))?;
    within(t, Duration::from_secs(1))?;

    let g = game("quit-loop");
    let s0 = state(&g, "1");
    let two = Q::from_integer(2.into());
    let third = r("2/3");
    let mut prev: Option<(Q, Q)> = None;
    for e in ["1/10", "1/100", "1/1000"] {
        let t = Instant::now();
        let eps = r(e);
        let p = quit_loop_profile(&g, &eps);
        let v = lib(evaluate_profile(&g, &p))?.column(s0);
        let den = Q::from_integer(6.into()) - Q::from_integer(3.into()) * &eps;
        let want = [Q::one() - &two / &den, Q::one() - (&two - &two * &eps) / &den];
        ensure(v == want, || format!("eps {e}: {v:?}"))?;
        let gap = ((&v[0] - &third).abs(), (&v[1] - &third).abs());
        if let Some(prev) = &prev {
            ensure(gap.0 < prev.0 && gap.1 < prev.1, || format!("eps {e}: not closer to 2/3"))?;
        }
        prev = Some(gap);
        within(t, Duration::from_secs(1))?;
    }
    Ok(())
}

fn c3() -> Outcome {
    let t = Instant::now();
    let (g, p) = (fx("fig3.json"), fx("profiles/fig3-eps.json"));
    let (code, v) = impeq(&["check", "--game", &g, "--profile", &p, "--kind", "eps-nash", "--epsilon", "1/10"]);
    ensure(code == 0 && v["accepted"] == true, || format!("eps-nash exit {code}: {v}"))?;
    let (code, v) = impeq(&["check", "--game", &g, "--profile", &p, "--kind", "imprecise", "--epsilon", "1/10"]);
    ensure(code == 1 && v["accepted"] == false, || format!("imprecise exit {code}: {v}"))?;
    let w = field(&v, &["witness", "deviation_value"])?;
    ensure(w == r("9/100"), || format!("witness value {w}"))?;
    within(t, Duration::from_secs(1))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let g = game("team");
    let s = state(&g, "s");
    let v = lib(check_nash(&g, &profile(&g, "team-uniform"), s))?;
    ensure(v.accepted, || "uniform profile rejected".into())?;
    let pure: Vec<_> = g.arena().players().map(|i| enumerate_pure_memoryless(&g, i)).collect();
    let mut count = 0;
    for a in &pure[0] {
        for b in &pure[1] {
            count += 1;
            let prof = StationaryProfile { strategies: vec![a.clone(), b.clone()] };
            ensure(!lib(check_nash(&g, &prof, s))?.accepted, || "a pure profile is Nash".into())?;
        }
    }
    ensure(count == 4, || format!("{count} pure profiles"))?;
    within(t, Duration::from_secs(1))
}

fn c5() -> Outcome {
    let t = Instant::now();
    let out = cli::run(["impeq", "search", "--game", &fx("hide-or-run.json"), "--kind", "nash", "--grid", "20"]);
    ensure(out.code == 0, || format!("search exit {}: {}", out.code, out.stderr))?;
    let v: Value = lib(serde_json::from_str(&out.stdout))?;
    let found = v["profiles"].as_array().map(Vec::len);
    ensure(found == Some(0), || format!("found {found:?}: {v}"))?;
    within(t, Duration::from_secs(60))
}

fn c6() -> Outcome {
    let t = Instant::now();
    for seed in 0..50 {
        let g = random_game(seed);
        let p = random_profile(&g, seed);
        for e in ["1/10", "1/4"] {
            let eps = r(e);
            for i in g.arena().players() {
                let tbg = lib(build_deviation_game(&fix_coplayers(&g, &p, i), &eps))?;
                let sol = lib(solve_turn_based(&tbg))?;
                let NodeValues::Exact(tb) = sol.state_values(g.arena().num_states()) else {
                    return fail(format!("seed {seed}: inexact values"));
                };
                let ball = lib(imprecise_deviation_value(&g, &p, i, &eps))?.values;
                ensure(tb == ball, || format!("seed {seed} eps {e} player {}", i.0))?;
            }
        }
    }
    within(t, Duration::from_secs(300))
}

fn c7() -> Outcome {
    let eps: Vec<Q> = ["0", "1/10", "1/4"].iter().map(|e| r(e)).collect();
    let mut nash_seen = 0;
    for seed in 0..50 {
        let g = random_game(seed);
        let s0 = StateId(0);
        let mut cands: Vec<StationaryProfile> = (0..4).map(|k| random_profile(&g, seed * 10 + k)).collect();
        let pure: Vec<_> = g.arena().players().map(|i| enumerate_pure_memoryless(&g, i)).collect();
        for a in &pure[0] {
            for b in &pure[1] {
                cands.push(StationaryProfile { strategies: vec![a.clone(), b.clone()] });
            }
        }
        let grid = lib(brute_force_search(&g, &SearchKind::Nash, s0, 4, u128::MAX))?;
        cands.extend(grid.into_iter().map(|(p, _)| p));
        for p in cands {
            let nash = lib(check_nash(&g, &p, s0))?.accepted;
            let acc: Vec<bool> =
                eps.iter().map(|e| check_imprecise(&g, &p, s0, e).map(|v| v.accepted)).collect::<Result<_, _>>().map_err(|e| Status::Fail(e.to_string()))?;
            if nash {
                nash_seen += 1;
                ensure(acc.iter().all(|a| *a), || format!("seed {seed}: Nash not imprecise"))?;
            }
            ensure(acc.windows(2).all(|w| !w[0] || w[1]), || format!("seed {seed}: not monotone"))?;
        }
    }
    ensure(nash_seen > 0, || "no Nash profiles in the corpus".into())
}

fn c8() -> Outcome {
    let t = Instant::now();
    let eps = r("1/10");
    for (name, start) in [("quit-loop", "1"), ("hide-or-run", "s0")] {
        let g = lib(make_cycle_free(&game(name)))?.game;
        let s0 = state(&g, start);
        let spec = lib(delta_epsilon_spec(&g, &eps))?;
        let bound = lib(termination_bound(&g, &eps))?;
        let p = to_f64(&bound.p);
        for k in 0..20 {
            let prof = lib(project_to_delta_epsilon(&g, &random_profile(&g, 1000 + k), &spec))?;
            ensure(lib(in_delta_epsilon(&prof, &spec))?, || format!("{name}: profile {k} outside"))?;
            let est = monte_carlo_estimate(&g, &prof, s0, 100_000, bound.k * 5, 7 + k);
            for n in 1..=5i32 {
                let emp = est.absorbed_by[bound.k * n as usize];
                let ci = 1.96 * (emp * (1.0 - emp) / 100_000.0).sqrt() + 1e-12;
                let floor = 1.0 - p.powi(n);
                ensure(emp >= floor - ci, || format!("{name} profile {k} n={n}: {emp} < {floor}"))?;
            }
        }
    }
    within(t, Duration::from_secs(120))
}

fn c9() -> Outcome {
    for (name, start) in [("hide-or-run", "s0"), ("quit-loop", "1")] {
        let g = game(name);
        let s0 = state(&g, start);
        for e in ["1/20", "1/10"] {
            let t = Instant::now();
            let eps = r(e);
            let c = lib(compute_equilibrium(&g, &eps, s0, &IterationConfig::default()))?;
            let v = lib(check_imprecise(&g, &c.profile, s0, &eps))?;
            ensure(v.accepted, || format!("{name} eps {e}: rejected"))?;
            within(t, Duration::from_secs(60))?;
        }
    }
    Ok(())
}

fn c10() -> Outcome {
    let t = Instant::now();
    let cfg = SolverConfig::default();
    if !cfg.available() {
        return Err(Status::Skip(format!("solver `{}` not on PATH", cfg.command.join(" "))));
    }
    let g = game("hide-or-run");
    let s0 = state(&g, "s0");
    let eps = r("1/10");

    // the known equilibrium pays p1 2eps-1 = -4/5
    let q = EtrQuery::new(eps.clone(), s0, vec![Some((r("-1"), r("-1/2"))), None]);
    let rep = lib(etr::solve(&g, &q, &cfg))?;
    match rep.outcome {
        EtrOutcome::Sat { profile, verdict, .. } => {
            ensure(verdict.accepted, || "witness rejected".into())?;
            let again = lib(check_imprecise(&g, &profile, s0, &eps))?;
            ensure(again.accepted, || "witness rejected on recheck".into())?;
            let u = &again.payoffs[0];
            ensure(r("-1") <= *u && *u <= r("-1/2"), || format!("payoff {u} outside bounds"))?;
        }
        other => return fail(format!("expected sat, got {other:?}")),
    }

    // no grid equilibrium pays p1 within [-1/10, 0]
    let (lo, hi) = (r("-1/10"), Q::zero());
    let grid = lib(brute_force_search(&g, &SearchKind::Imprecise(eps.clone()), s0, 10, u128::MAX))?;
    ensure(!grid.is_empty(), || "grid search found nothing".into())?;
    ensure(grid.iter().all(|(_, u)| u[0] < lo || u[0] > hi), || "a grid payoff lies in the bounds".into())?;
    let q = EtrQuery::new(eps, s0, vec![Some((lo, hi)), None]);
    let rep = lib(etr::solve(&g, &q, &cfg))?;
    ensure(matches!(rep.outcome, EtrOutcome::Unsat), || format!("expected unsat: {:?}", rep.to_json(&g)))?;
    ensure(rep.guesses_tried as u128 == rep.guesses_total, || "not every guess was tried".into())?;
    within(t, Duration::from_secs(600))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("hide-or-run payoffs and imprecise acceptance", c1),
        ("quit-loop payoffs, acceptance and limit 2/3", c2),
        ("fig3 eps-Nash accepted, imprecise rejected at 9/100", c3),
        ("team game: uniform Nash, no pure Nash", c4),
        ("hide-or-run: no Nash on the 1/20 grid", c5),
        ("deviation game value equals ball value on 50 random games", c6),
        ("Nash implies imprecise; acceptance monotone in eps", c7),
        ("termination bound holds empirically in Delta_eps", c8),
        ("compute_equilibrium output is accepted", c9),
        ("ETR pipeline: SAT witness accepted, UNSAT bounds", c10),
    ];
    let (mut failed, mut skipped) = (0, 0);
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let status = match f() {
            Ok(()) => Status::Pass,
            Err(s) => s,
        };
        let secs = t.elapsed().as_secs_f64();
        match status {
            Status::Pass => println!("criterion {:>2}: PASS  {name} ({secs:.2}s)", k + 1),
            Status::Fail(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.2}s): {why}", k + 1);
            }
            Status::Skip(why) => {
                skipped += 1;
                println!("criterion {:>2}: SKIP  {name}: {why}", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed, {skipped} skipped", criteria.len() - failed - skipped);
    if failed > 0 {
        ExitCode::FAILURE
    } else if skipped > 0 {
        ExitCode::from(77)
    } else {
        ExitCode::SUCCESS
    }
}
