//! Running an external SMT solver over stdin.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::rational::Q;

use super::smtmodel::parse_model;

pub const DEFAULT_SOLVER: &str = "z3 -in -smt2";

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub timeout: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_command_line(DEFAULT_SOLVER)
    }
}

impl SolverConfig {
    pub fn from_command_line(cmd: &str) -> Self {
        SolverConfig {
            command: cmd.split_whitespace().map(str::to_string).collect(),
            timeout: None,
        }
    }

    /// Whether the program resolves to an executable file.
    pub fn available(&self) -> bool {
        let Some(prog) = self.command.first() else { return false };
        if prog.contains('/') {
            return Path::new(prog).is_file();
        }
        std::env::var_os("PATH")
            .map(|paths| std::env::split_paths(&paths).any(|d| d.join(prog).is_file()))
            .unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SatResult {
    Sat(BTreeMap<String, Q>),
    Unsat,
    Unknown(String),
}

pub fn run_solver(cfg: &SolverConfig, formula: &str) -> Result<SatResult> {
    let (prog, args) = cfg
        .command
        .split_first()
        .ok_or_else(|| Error::Solver("empty solver command".into()))?;
    let mut child = Command::new(prog)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Solver(format!("cannot start {prog}: {e}")))?;
    let mut stdout = child.stdout.take().unwrap();
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    {
        let mut stdin = child.stdin.take().unwrap();
        stdin.write_all(formula.as_bytes())?;
    }
    let start = Instant::now();
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if cfg.timeout.is_some_and(|t| start.elapsed() > t) {
            let _ = child.kill();
            let _ = child.wait();
            let _ = reader.join();
            return Ok(SatResult::Unknown("timeout".into()));
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    let out = reader
        .join()
        .map_err(|_| Error::Solver("reader thread panicked".into()))??;
    let mut lines = out.lines();
    match lines.next().map(str::trim) {
        Some("sat") => Ok(SatResult::Sat(parse_model(&lines.collect::<Vec<_>>().join("\n"))?)),
        Some("unsat") => Ok(SatResult::Unsat),
        Some(other) => Ok(SatResult::Unknown(other.to_string())),
        None => Err(Error::Solver("no output".into())),
    }
}
