mod common;

use common::{fixture_path, r};
use imprecise_eq::cli::run;
use serde_json::Value;

fn impeq(args: &[&str]) -> (i32, String, String) {
    let out = run(std::iter::once("impeq").chain(args.iter().copied()));
    (out.code, out.stdout, out.stderr)
}

fn fx(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

#[test]
fn imprecise_check_accepts_known_equilibrium() {
    let (code, out, _) = impeq(&[
        "check", "--game", &fx("hide-or-run.json"), "--profile", &fx("profiles/hide-or-run-eq.json"),
        "--kind", "imprecise", "--epsilon", "1/10",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["payoffs"]["p1"], "-4/5");
}

#[test]
fn eval_quit_loop() {
    let (code, out, _) = impeq(&[
        "eval", "--game", &fx("quit-loop.json"), "--profile", &fx("profiles/quit-loop-eps.json"), "--state", "1",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    let get = |p: &str| r(v["payoffs"][p].as_str().unwrap());
    assert_eq!(get("p1"), r("37/57"));
    assert_eq!(get("p2"), r("39/57"));
}

#[test]
fn disallowed_action_is_a_validation_error() {
    let (code, out, err) = impeq(&[
        "check", "--game", &fx("hide-or-run.json"), "--profile", &fx("profiles/hide-or-run-bad.json"), "--kind", "nash",
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("not allowed"));
}

#[test]
fn rejection_exits_with_one() {
    let (code, out, _) = impeq(&[
        "check", "--game", &fx("fig3.json"), "--profile", &fx("profiles/fig3-eps.json"),
        "--kind", "imprecise", "--epsilon", "1/10",
    ]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["witness"]["deviation_value"], "9/100");
}

#[test]
fn usage_errors() {
    assert_eq!(impeq(&["frobnicate"]).0, 2);
    assert_eq!(impeq(&["check", "--game", &fx("fig3.json")]).0, 2);
    assert_eq!(impeq(&["analyze", "--game", "/no/such/file.json"]).0, 2);
    // decimals are not rationals
    assert_eq!(impeq(&["analyze", "--game", &fx("fig3.json"), "--epsilon", "0.1"]).0, 2);
    let (code, _, err) = impeq(&[
        "check", "--game", &fx("fig3.json"), "--profile", &fx("profiles/fig3-eps.json"), "--kind", "imprecise",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("--epsilon"));
    assert_eq!(impeq(&["--help"]).0, 0);
}

#[test]
fn every_fixture_round_trips() {
    for name in ["team", "hide-or-run", "quit-loop", "fig3", "cycling-trap"] {
        let game = fx(&format!("{name}.json"));
        let (code, out, err) = impeq(&["validate", "--game", &game]);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(json(&out)["valid"], true);
        let (code, out, err) = impeq(&["analyze", "--game", &game, "--epsilon", "1/10"]);
        assert_eq!(code, 0, "{name}: {err}");
        assert!(json(&out)["cycling_states"].is_array());
        let (code, out, err) = impeq(&["solve", "--game", &game, "--epsilon", "1/10"]);
        assert!(code == 0 || code == 1, "{name}: {err}");
        let computed = json(&out);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, computed["profile"].to_string()).unwrap();
        for kind in ["nash", "eps-nash", "imprecise"] {
            let (code, out, err) = impeq(&[
                "check", "--game", &game, "--profile", path.to_str().unwrap(), "--kind", kind, "--epsilon", "1/10",
            ]);
            assert!(code == 0 || code == 1, "{name} {kind}: {err}");
            assert_eq!(json(&out)["kind"], kind);
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "simulate", "--game", &fx("quit-loop.json"), "--profile", &fx("profiles/quit-loop-eps.json"),
        "--samples", "2000", "--horizon", "50", "--seed", "7",
    ];
    let a = impeq(&args);
    let b = impeq(&args);
    assert_eq!(a, b);
    let mut threads = args.to_vec();
    threads.extend(["--threads", "1"]);
    assert_eq!(impeq(&threads).1, a.1);
}

#[test]
fn csv_output() {
    let (code, out, _) = impeq(&[
        "eval", "--game", &fx("hide-or-run.json"), "--profile", &fx("profiles/hide-or-run-eq.json"), "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert!(rows.iter().any(|r| &r[0] == "s0" && &r[1] == "p1" && &r[2] == "-4/5"));
    let (code, out, _) = impeq(&["analyze", "--game", &fx("fig3.json"), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("path,value\n"));
}

#[test]
fn value_methods_agree() {
    let base = [
        "value", "--game", &fx("quit-loop.json"), "--profile", &fx("profiles/quit-loop-eps.json"), "--epsilon", "1/10",
    ];
    let ball = json(&impeq(&base).1);
    let mut args = base.to_vec();
    args.extend(["--method", "game"]);
    let game = json(&impeq(&args).1);
    for p in ["p1", "p2"] {
        assert_eq!(game["players"][p]["exact"], true);
        for s in ["1", "2"] {
            assert_eq!(ball["players"][p]["values"][s], game["players"][p]["values"][s], "{p} {s}");
        }
    }
}

#[test]
fn search_finds_no_nash_in_hide_or_run() {
    let (code, out, _) = impeq(&["search", "--game", &fx("hide-or-run.json"), "--kind", "nash", "--grid", "10"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 0);
}

#[test]
fn emit_etr_files_and_missing_solver() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = impeq(&[
        "emit-etr", "--game", &fx("hide-or-run.json"), "--epsilon", "1/10", "--bounds", "p1=-1:-1/2",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["written"], 64);
    assert_eq!(v["shift"], "1");
    let smt = std::fs::read_to_string(dir.path().join("guess-0.smt2")).unwrap();
    assert!(smt.starts_with("(set-logic QF_NRA)") && smt.contains("(check-sat)") && smt.contains("(get-model)"));
    let side = json(&std::fs::read_to_string(dir.path().join("guess-0.json")).unwrap());
    assert_eq!(side["variables"]["u_i0_s0"]["kind"], "payoff");

    let (code, out, _) = impeq(&["emit-etr", "--game", &fx("hide-or-run.json"), "--epsilon", "1/10", "--guess", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("(set-logic QF_NRA)"));

    let (code, _, err) = impeq(&[
        "emit-etr", "--game", &fx("hide-or-run.json"), "--epsilon", "1/10", "--dispatch", "--solver-cmd", "no-such-solver",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("no-such-solver"));
}
