//! Command-line front end. [`run`] returns the exit code and both output
//! streams so the binary stays a thin wrapper and tests need no subprocess.
//!
//! Exit codes: 0 success or acceptance, 1 well-formed rejection, 2 usage or
//! validation error, 3 external solver unavailable.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::deviation::{build_deviation_game, fix_coplayers, imprecise_deviation_value, solve_turn_based, NodeValues};
use crate::equilibrium::{
    brute_force_search, check_epsilon_nash, check_imprecise, check_nash, compute_equilibrium, IterationConfig,
    SearchKind, DEFAULT_SEARCH_CAP,
};
use crate::error::{Error, Result};
use crate::etr::{self, EtrOutcome, EtrQuery, PerturberMode, SolverConfig, DEFAULT_GUESS_CAP, DEFAULT_SOLVER};
use crate::model::{parse_game, Game, PlayerId, StateId};
use crate::payoff::{evaluate_profile, monte_carlo_estimate};
use crate::rational::{format_rational, parse_rational, Q};
use crate::strategy::{parse_profile, profile_to_json, StationaryProfile};
use crate::structure::{analyze, DEFAULT_COMPONENT_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "impeq", version, about = "Equilibria of concurrent stochastic games under imprecise deviations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum KindArg {
    Nash,
    EpsNash,
    Imprecise,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ValueMethod {
    /// minimum over each pure deviation's ball
    Ball,
    /// solve the turn-based deviation game
    Game,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum PerturberArg {
    Symbolic,
    Explicit,
}

#[derive(Args, Debug)]
struct GameArg {
    #[arg(long)]
    game: PathBuf,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    /// Initial state (default: the first state)
    #[arg(long)]
    state: Option<String>,
}

fn rational(text: &str) -> std::result::Result<Q, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a game (and optionally a profile)
    Validate {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Cycling states, strong components, exit actions, constraints
    Analyze {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_parser = rational)]
        epsilon: Option<Q>,
        /// Largest state count for component enumeration
        #[arg(long, default_value_t = DEFAULT_COMPONENT_CAP)]
        cap: usize,
    },
    /// Exact payoffs of a stationary profile
    Eval {
        #[command(flatten)]
        args: ProfileArgs,
    },
    /// Check a profile against an equilibrium notion
    Check {
        #[command(flatten)]
        args: ProfileArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_parser = rational)]
        epsilon: Option<Q>,
    },
    /// Value of the best imprecise deviation for each player
    Value {
        #[command(flatten)]
        args: ProfileArgs,
        #[arg(long, value_parser = rational)]
        epsilon: Q,
        #[arg(long)]
        player: Option<String>,
        #[arg(long, value_enum, default_value_t = ValueMethod::Ball)]
        method: ValueMethod,
    },
    /// Compute an equilibrium by damped best-response iteration
    Solve {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_parser = rational)]
        epsilon: Q,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_parser = rational, default_value = "1/2")]
        damping: Q,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Exhaustive search over a rational grid of profiles
    Search {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_parser = rational)]
        epsilon: Option<Q>,
        #[arg(long)]
        state: Option<String>,
        /// Grid denominator
        #[arg(long, default_value_t = 10)]
        grid: u32,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u128,
    },
    /// Emit (and optionally solve) the real-arithmetic existence formulas
    EmitEtr {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_parser = rational)]
        epsilon: Q,
        #[arg(long)]
        state: Option<String>,
        /// Payoff bounds in input units, `player=lo:hi`
        #[arg(long = "bounds", num_args = 1..)]
        bounds: Vec<String>,
        /// Write every guess as `guess-N.smt2` plus `guess-N.json`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print this guess's formula (without --out)
        #[arg(long, default_value_t = 0)]
        guess: u128,
        #[arg(long)]
        dispatch: bool,
        #[arg(long, default_value = DEFAULT_SOLVER)]
        solver_cmd: String,
        /// Per-call solver timeout in seconds
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long, value_enum, default_value_t = PerturberArg::Symbolic)]
        perturber: PerturberArg,
        /// Omit the exiting-action constraints
        #[arg(long)]
        no_delta_epsilon: bool,
        #[arg(long, default_value_t = DEFAULT_GUESS_CAP)]
        cap: u128,
    },
    /// Monte-Carlo estimate of payoffs and absorption
    Simulate {
        #[command(flatten)]
        args: ProfileArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1_000)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Reply {
    code: i32,
    body: Value,
    /// preformatted output bypassing JSON/CSV rendering
    raw: Option<String>,
    csv: Option<String>,
}

impl Reply {
    fn ok(body: Value) -> Self {
        Reply { code: 0, body, raw: None, csv: None }
    }

    fn verdict(accepted: bool, body: Value) -> Self {
        Reply { code: if accepted { 0 } else { 1 }, body, raw: None, csv: None }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return CliOutput { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(reply) => {
            let stdout = match (reply.raw, cli.format) {
                (Some(raw), _) => raw,
                (None, Format::Json) => format!("{}\n", serde_json::to_string_pretty(&reply.body).unwrap()),
                (None, Format::Csv) => reply.csv.unwrap_or_else(|| flatten_csv(&reply.body)),
            };
            CliOutput { code: reply.code, stdout, stderr: String::new() }
        }
        Err(Failure::Usage(msg)) => CliOutput { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Solver(msg)) => CliOutput { code: 3, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

/// `path,value` rows of a JSON document, paths joined with `.`.
fn flatten_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(k, x)| walk(&join(&k.to_string()), x, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "value"]).unwrap();
    for (k, x) in rows {
        w.write_record([k, x]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> std::result::Result<Game, Failure> {
    parse_game(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_profile(game: &Game, path: &Path) -> std::result::Result<StationaryProfile, Failure> {
    parse_profile(game, &read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn initial_state(game: &Game, name: Option<&str>) -> Result<StateId> {
    match name {
        Some(n) => game.arena().state_id(n),
        None => Ok(StateId(0)),
    }
}

fn check_epsilon(eps: &Q) -> std::result::Result<(), Failure> {
    if eps <= &Q::from_integer(0.into()) || eps > &Q::from_integer(1.into()) {
        return Err(Failure::Usage(format!("epsilon {} outside (0, 1]", format_rational(eps))));
    }
    Ok(())
}

fn per_player(game: &Game, v: &[Q]) -> Value {
    let ar = game.arena();
    ar.players()
        .map(|i| (ar.player_name(i).to_string(), Value::from(format_rational(&v[i.0]))))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn parse_bounds(game: &Game, specs: &[String]) -> std::result::Result<etr::Bounds, Failure> {
    let mut out = vec![None; game.arena().num_players()];
    for spec in specs {
        let bad = || Failure::Usage(format!("bounds must look like player=lo:hi, got {spec:?}"));
        let (player, range) = spec.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
        let i = game.arena().player_id(player)?;
        out[i.0] = Some((parse_rational(lo)?, parse_rational(hi)?));
    }
    Ok(out)
}

fn dispatch(cmd: &Command) -> std::result::Result<Reply, Failure> {
    match cmd {
        Command::Validate { game, profile } => {
            let g = load_game(game)?;
            let mut body = json!({
                "valid": true,
                "states": g.arena().num_states(),
                "players": g.arena().num_players(),
                "actions": g.arena().num_actions(),
                "finals": g.finals().map(|f| g.arena().state_name(f)).collect::<Vec<_>>(),
            });
            if let Some(p) = profile {
                let prof = load_profile(&g, p)?;
                body["profile"] = profile_to_json(&g, &prof);
            }
            Ok(Reply::ok(body))
        }
        Command::Analyze { game, epsilon, cap } => {
            let g = load_game(&game.game)?;
            if let Some(e) = epsilon {
                check_epsilon(e)?;
            }
            Ok(Reply::ok(analyze(&g, epsilon.as_ref(), *cap)?))
        }
        Command::Eval { args } => {
            let g = load_game(&args.game)?;
            let p = load_profile(&g, &args.profile)?;
            let v = evaluate_profile(&g, &p)?;
            match &args.state {
                None => Ok(Reply { csv: Some(v.to_csv(&g)), ..Reply::ok(v.to_json(&g)) }),
                Some(name) => {
                    let s = g.arena().state_id(name)?;
                    Ok(Reply::ok(json!({ "state": name, "payoffs": per_player(&g, &v.column(s)) })))
                }
            }
        }
        Command::Check { args, kind, epsilon } => {
            let g = load_game(&args.game)?;
            let p = load_profile(&g, &args.profile)?;
            let s0 = initial_state(&g, args.state.as_deref())?;
            let need_eps = || -> std::result::Result<&Q, Failure> {
                let e = epsilon.as_ref().ok_or_else(|| Failure::Usage("--epsilon is required for this kind".into()))?;
                check_epsilon(e)?;
                Ok(e)
            };
            let verdict = match kind {
                KindArg::Nash => check_nash(&g, &p, s0)?,
                KindArg::EpsNash => check_epsilon_nash(&g, &p, s0, need_eps()?)?,
                KindArg::Imprecise => check_imprecise(&g, &p, s0, need_eps()?)?,
            };
            Ok(Reply::verdict(verdict.accepted, verdict.to_json(&g)))
        }
        Command::Value { args, epsilon, player, method } => {
            check_epsilon(epsilon)?;
            let g = load_game(&args.game)?;
            let p = load_profile(&g, &args.profile)?;
            let players: Vec<PlayerId> = match player {
                Some(name) => vec![g.arena().player_id(name)?],
                None => g.arena().players().collect(),
            };
            let mut out = serde_json::Map::new();
            for i in players {
                let v = match method {
                    ValueMethod::Ball => imprecise_deviation_value(&g, &p, i, epsilon)?.to_json(&g),
                    ValueMethod::Game => {
                        let tbg = build_deviation_game(&fix_coplayers(&g, &p, i), epsilon)?;
                        let sol = solve_turn_based(&tbg)?;
                        let names = g.arena().state_names();
                        match sol.state_values(g.arena().num_states()) {
                            NodeValues::Exact(v) => json!({
                                "exact": true,
                                "values": names.iter().zip(&v).map(|(n, x)| (n.clone(), Value::from(format_rational(x)))).collect::<serde_json::Map<_, _>>(),
                            }),
                            NodeValues::Approx(v) => json!({
                                "exact": false,
                                "values": names.iter().zip(&v).map(|(n, x)| (n.clone(), Value::from(*x))).collect::<serde_json::Map<_, _>>(),
                            }),
                        }
                    }
                };
                out.insert(g.arena().player_name(i).to_string(), v);
            }
            Ok(Reply::ok(json!({ "epsilon": format_rational(epsilon), "players": out })))
        }
        Command::Solve { game, epsilon, state, damping, max_iterations, tolerance } => {
            check_epsilon(epsilon)?;
            let g = load_game(&game.game)?;
            let s0 = initial_state(&g, state.as_deref())?;
            let config = IterationConfig {
                damping: damping.clone(),
                tolerance: *tolerance,
                max_iterations: *max_iterations,
                ..IterationConfig::default()
            };
            let c = compute_equilibrium(&g, epsilon, s0, &config)?;
            Ok(Reply::verdict(c.verdict.accepted, c.to_json(&g)))
        }
        Command::Search { game, kind, epsilon, state, grid, cap } => {
            let g = load_game(&game.game)?;
            let s0 = initial_state(&g, state.as_deref())?;
            let need_eps = || -> std::result::Result<Q, Failure> {
                let e = epsilon.clone().ok_or_else(|| Failure::Usage("--epsilon is required for this kind".into()))?;
                check_epsilon(&e)?;
                Ok(e)
            };
            let k = match kind {
                KindArg::Nash => SearchKind::Nash,
                KindArg::EpsNash => SearchKind::EpsilonNash(need_eps()?),
                KindArg::Imprecise => SearchKind::Imprecise(need_eps()?),
            };
            let found = brute_force_search(&g, &k, s0, *grid, *cap)?;
            let profiles: Vec<Value> = found
                .iter()
                .map(|(p, v)| json!({ "profile": profile_to_json(&g, p), "payoffs": per_player(&g, v) }))
                .collect();
            Ok(Reply::ok(json!({ "grid": grid, "count": profiles.len(), "profiles": profiles })))
        }
        Command::EmitEtr {
            game,
            epsilon,
            state,
            bounds,
            out,
            guess,
            dispatch,
            solver_cmd,
            timeout,
            perturber,
            no_delta_epsilon,
            cap,
        } => {
            check_epsilon(epsilon)?;
            let g = load_game(&game.game)?;
            let s0 = initial_state(&g, state.as_deref())?;
            let mut query = EtrQuery::new(epsilon.clone(), s0, parse_bounds(&g, bounds)?);
            query.mode = match perturber {
                PerturberArg::Symbolic => PerturberMode::Symbolic,
                PerturberArg::Explicit => PerturberMode::Explicit,
            };
            query.delta_epsilon = !no_delta_epsilon;
            query.cap = *cap;
            if *dispatch {
                let mut cfg = SolverConfig::from_command_line(solver_cmd);
                cfg.timeout = timeout.map(std::time::Duration::from_secs);
                if !cfg.available() {
                    return Err(Failure::Solver(format!("solver not found: {solver_cmd}")));
                }
                let report = etr::solve(&g, &query, &cfg)?;
                let sat = matches!(report.outcome, EtrOutcome::Sat { .. });
                return Ok(Reply::verdict(sat, report.to_json(&g)));
            }
            let prepared = etr::prepare(&g, &query)?;
            let space = etr::guesses(&prepared, &query)?;
            let total = space.total();
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
                    let mut written = 0usize;
                    let (mut max_assertions, mut max_terms) = (0, 0);
                    for (idx, gs) in space {
                        let f = etr::formula_for(&prepared, &query, &gs)?;
                        max_assertions = max_assertions.max(f.assertion_count());
                        max_terms = max_terms.max(f.term_count());
                        let mut side = f.sidecar(&prepared.game);
                        side["guess"] = gs.to_json(&prepared.game);
                        side["shift"] = json!(format_rational(&prepared.shift));
                        let write = |name: String, text: String| {
                            std::fs::write(dir.join(name), text).map_err(|e| Failure::Usage(e.to_string()))
                        };
                        write(format!("guess-{idx}.smt2"), f.to_smtlib())?;
                        write(format!("guess-{idx}.json"), serde_json::to_string_pretty(&side).unwrap())?;
                        written += 1;
                    }
                    Ok(Reply::ok(json!({
                        "guesses_total": total.to_string(),
                        "written": written,
                        "shift": format_rational(&prepared.shift),
                        "max_assertions": max_assertions,
                        "max_terms": max_terms,
                        "directory": dir.display().to_string(),
                    })))
                }
                None => {
                    let (_, gs) = space
                        .into_iter()
                        .find(|(idx, _)| idx == guess)
                        .ok_or_else(|| Failure::Usage(format!("no guess with index {guess} (total {total})")))?;
                    let f = etr::formula_for(&prepared, &query, &gs)?;
                    Ok(Reply { raw: Some(f.to_smtlib()), ..Reply::ok(Value::Null) })
                }
            }
        }
        Command::Simulate { args, samples, horizon, seed } => {
            let g = load_game(&args.game)?;
            let p = load_profile(&g, &args.profile)?;
            let s0 = initial_state(&g, args.state.as_deref())?;
            let est = monte_carlo_estimate(&g, &p, s0, *samples, *horizon, *seed);
            let mut body = serde_json::to_value(&est).unwrap();
            body["state"] = json!(g.arena().state_name(s0));
            Ok(Reply::ok(body))
        }
    }
}
