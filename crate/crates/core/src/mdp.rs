//! Single-controller decision processes with terminal rewards.
//!
//! Runs that never reach a terminal state pay 0, in both the maximizing and
//! the minimizing direction. Plain policy iteration gets stuck on such models
//! (staying in a loop and leaving it can look equally good), so the policy
//! iteration path first collapses maximal end components into single nodes
//! that may either leave through an exit choice or stop with reward 0. Every
//! policy of the quotient terminates, which makes its Bellman equation
//! uniquely solvable.

use num::traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::chain::{Chain, Row};
use crate::error::Result;
use crate::model::Distribution;
use crate::rational::Q;

/// Above this many pure memoryless policies, enumeration gives way to policy
/// iteration.
pub const ENUMERATION_LIMIT: u128 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Enumerate up to the given number of policies, policy iteration above.
    Auto(u128),
    Enumerate,
    PolicyIteration,
}

impl Default for Method {
    fn default() -> Self {
        Method::Auto(ENUMERATION_LIMIT)
    }
}

#[derive(Clone, Debug)]
pub struct Mdp {
    /// `Some(reward)` marks an absorbing terminal state.
    pub terminal: Vec<Option<Q>>,
    /// Available moves at non-terminal states; must be non-empty there.
    pub choices: Vec<Vec<Distribution<usize>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdpSolution {
    pub values: Vec<Q>,
    /// Chosen move per state (0 at terminals).
    pub policy: Vec<usize>,
}

impl Goal {
    fn better(self, a: &Q, b: &Q) -> bool {
        match self {
            Goal::Max => a > b,
            Goal::Min => a < b,
        }
    }
}

impl Mdp {
    pub fn num_policies(&self) -> u128 {
        self.choices
            .iter()
            .zip(&self.terminal)
            .filter(|(_, t)| t.is_none())
            .map(|(c, _)| c.len() as u128)
            .fold(1u128, |acc, k| acc.saturating_mul(k))
    }

    pub fn evaluate(&self, policy: &[usize]) -> Result<Vec<Q>> {
        let rows = self
            .terminal
            .iter()
            .enumerate()
            .map(|(s, t)| match t {
                Some(r) => Row::Terminal(vec![r.clone()]),
                None => Row::Step(self.choices[s][policy[s]].clone()),
            })
            .collect();
        Ok(Chain::new(rows, 1)
            .values()?
            .into_iter()
            .map(|mut v| v.pop().unwrap())
            .collect())
    }

    pub fn solve(&self, goal: Goal, method: Method) -> Result<MdpSolution> {
        let enumerate = match method {
            Method::Enumerate => true,
            Method::PolicyIteration => false,
            Method::Auto(limit) => self.num_policies() <= limit,
        };
        if enumerate {
            self.solve_by_enumeration(goal)
        } else {
            self.solve_by_policy_iteration(goal)
        }
    }

    /// Pointwise optimum over all pure memoryless policies; the witness is the
    /// first policy in lexicographic order attaining it everywhere.
    fn solve_by_enumeration(&self, goal: Goal) -> Result<MdpSolution> {
        let n = self.terminal.len();
        let radix: Vec<usize> = (0..n)
            .map(|s| if self.terminal[s].is_some() { 1 } else { self.choices[s].len() })
            .collect();
        let mut policy = vec![0usize; n];
        let mut best: Option<Vec<Q>> = None;
        let mut evaluated: Vec<(Vec<usize>, Vec<Q>)> = Vec::new();
        loop {
            let v = self.evaluate(&policy)?;
            best = Some(match best {
                None => v.clone(),
                Some(b) => b
                    .into_iter()
                    .zip(&v)
                    .map(|(x, y)| if goal.better(y, &x) { y.clone() } else { x })
                    .collect(),
            });
            evaluated.push((policy.clone(), v));
            // odometer, last state fastest
            let mut s = n;
            loop {
                if s == 0 {
                    let best = best.unwrap();
                    let witness = evaluated
                        .into_iter()
                        .find(|(_, v)| *v == best)
                        .map(|(p, _)| p)
                        .expect("a uniformly optimal pure memoryless policy exists");
                    return Ok(MdpSolution {
                        values: best,
                        policy: witness,
                    });
                }
                s -= 1;
                policy[s] += 1;
                if policy[s] < radix[s] {
                    break;
                }
                policy[s] = 0;
            }
        }
    }

    fn solve_by_policy_iteration(&self, goal: Goal) -> Result<MdpSolution> {
        let n = self.terminal.len();
        let mecs = self.maximal_end_components();
        let mut node_of = vec![usize::MAX; n];
        // quotient nodes: one per terminal/non-MEC state, one per MEC, then a
        // 0-reward stop node
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (s, slot) in node_of.iter_mut().enumerate() {
            if mecs.component[s].is_none() {
                *slot = members.len();
                members.push(vec![s]);
            }
        }
        for mec in &mecs.sets {
            for &s in mec {
                node_of[s] = members.len();
            }
            members.push(mec.clone());
        }
        let stop = members.len();
        let total = stop + 1;

        // quotient choices remember their origin (state, move) or the stop move
        let mut q_terminal: Vec<Option<Q>> = vec![None; total];
        let mut q_choices: Vec<Vec<Distribution<usize>>> = vec![Vec::new(); total];
        let mut origin: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); total];
        q_terminal[stop] = Some(Q::zero());
        for (node, states) in members.iter().enumerate() {
            let s0 = states[0];
            if states.len() == 1 && mecs.component[s0].is_none() {
                if let Some(r) = &self.terminal[s0] {
                    q_terminal[node] = Some(r.clone());
                    continue;
                }
            }
            for &s in states {
                for (c, d) in self.choices[s].iter().enumerate() {
                    if mecs.internal[s].get(c).copied().unwrap_or(false) {
                        continue;
                    }
                    q_choices[node].push(d.map_keys(|t| node_of[t]));
                    origin[node].push(Some((s, c)));
                }
            }
            if mecs.component[s0].is_some() {
                q_choices[node].push(Distribution::dirac(stop));
                origin[node].push(None);
            }
        }
        let quotient = Mdp {
            terminal: q_terminal,
            choices: q_choices,
        };

        let mut policy = vec![0usize; total];
        let values = loop {
            let v = quotient.evaluate(&policy)?;
            let mut changed = false;
            for node in 0..total {
                if quotient.terminal[node].is_some() {
                    continue;
                }
                let score = |c: usize| -> Q {
                    quotient.choices[node][c]
                        .entries()
                        .iter()
                        .map(|(t, p)| p * &v[*t])
                        .sum()
                };
                let current = score(policy[node]);
                let mut best = (policy[node], current);
                for c in 0..quotient.choices[node].len() {
                    let sc = score(c);
                    if goal.better(&sc, &best.1) {
                        best = (c, sc);
                    }
                }
                if best.0 != policy[node] {
                    policy[node] = best.0;
                    changed = true;
                }
            }
            if !changed {
                break v;
            }
        };

        // back to the original states
        let mut out_values = vec![Q::zero(); n];
        let mut out_policy = vec![0usize; n];
        for (node, states) in members.iter().enumerate() {
            for &s in states {
                out_values[s] = values[node].clone();
            }
            if quotient.terminal[node].is_some() {
                continue;
            }
            match origin[node][policy[node]] {
                Some((s, c)) if mecs.component[s].is_none() => out_policy[s] = c,
                Some((exit_state, c)) => {
                    out_policy[exit_state] = c;
                    let steer = mecs.attractor(self, states, exit_state);
                    for (t, m) in steer {
                        out_policy[t] = m;
                    }
                }
                None => {
                    for &s in states {
                        out_policy[s] = mecs.internal[s].iter().position(|x| *x).unwrap();
                    }
                }
            }
        }
        Ok(MdpSolution {
            values: out_values,
            policy: out_policy,
        })
    }

    fn maximal_end_components(&self) -> Mecs {
        let n = self.terminal.len();
        let mut alive: Vec<bool> = self.terminal.iter().map(Option::is_none).collect();
        let mut internal: Vec<Vec<bool>> = (0..n)
            .map(|s| vec![self.terminal[s].is_none(); self.choices[s].len()])
            .collect();
        loop {
            // drop moves that can leave the candidate set
            for s in 0..n {
                for (c, d) in self.choices[s].iter().enumerate() {
                    if internal[s][c] && d.support().any(|t| !alive[t]) {
                        internal[s][c] = false;
                    }
                }
            }
            let mut graph = DiGraph::<usize, ()>::new();
            let nodes: Vec<_> = (0..n).map(|s| graph.add_node(s)).collect();
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                for (c, d) in self.choices[s].iter().enumerate() {
                    if internal[s][c] {
                        for t in d.support() {
                            graph.add_edge(nodes[s], nodes[t], ());
                        }
                    }
                }
            }
            let mut scc_of = vec![usize::MAX; n];
            for (k, comp) in tarjan_scc(&graph).into_iter().enumerate() {
                for v in comp {
                    scc_of[graph[v]] = k;
                }
            }
            let mut changed = false;
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                for (c, d) in self.choices[s].iter().enumerate() {
                    if internal[s][c] && d.support().any(|t| scc_of[t] != scc_of[s]) {
                        internal[s][c] = false;
                        changed = true;
                    }
                }
                if !internal[s].iter().any(|x| *x) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                let mut sets: Vec<Vec<usize>> = Vec::new();
                let mut component = vec![None; n];
                let mut index_of = std::collections::BTreeMap::new();
                for s in 0..n {
                    if alive[s] {
                        let k = *index_of.entry(scc_of[s]).or_insert_with(|| {
                            sets.push(Vec::new());
                            sets.len() - 1
                        });
                        sets[k].push(s);
                        component[s] = Some(k);
                    }
                }
                return Mecs {
                    sets,
                    component,
                    internal,
                };
            }
        }
    }
}

struct Mecs {
    sets: Vec<Vec<usize>>,
    component: Vec<Option<usize>>,
    /// `internal[s][c]`: move `c` keeps play inside the end component of `s`
    internal: Vec<Vec<bool>>,
}

impl Mecs {
    /// Internal moves steering every other state of `states` to `target`
    /// almost surely.
    fn attractor(&self, mdp: &Mdp, states: &[usize], target: usize) -> Vec<(usize, usize)> {
        let mut attracted = vec![target];
        let mut out = Vec::new();
        loop {
            let mut grew = false;
            for &s in states {
                if attracted.contains(&s) {
                    continue;
                }
                let pick = mdp.choices[s]
                    .iter()
                    .enumerate()
                    .find(|(c, d)| self.internal[s][*c] && d.support().any(|t| attracted.contains(&t)));
                if let Some((c, _)) = pick {
                    attracted.push(s);
                    out.push((s, c));
                    grew = true;
                }
            }
            if !grew {
                return out;
            }
        }
    }
}
