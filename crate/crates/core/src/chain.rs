//! Absorbing Markov chains with terminal rewards, solved exactly.

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::Distribution;
use crate::rational::Q;

#[derive(Clone, Debug)]
pub enum Row {
    /// Absorbing state paying the given reward vector.
    Terminal(Vec<Q>),
    Step(Distribution<usize>),
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub rows: Vec<Row>,
    pub dims: usize,
}

impl Chain {
    pub fn new(rows: Vec<Row>, dims: usize) -> Self {
        Chain { rows, dims }
    }

    /// States from which no terminal state is reachable.
    pub fn zero_reach(&self) -> Vec<bool> {
        let n = self.rows.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut reach = vec![false; n];
        let mut stack = Vec::new();
        for (s, row) in self.rows.iter().enumerate() {
            match row {
                Row::Terminal(_) => {
                    reach[s] = true;
                    stack.push(s);
                }
                Row::Step(d) => {
                    for t in d.support() {
                        preds[t].push(s);
                    }
                }
            }
        }
        while let Some(t) = stack.pop() {
            for &s in &preds[t] {
                if !reach[s] {
                    reach[s] = true;
                    stack.push(s);
                }
            }
        }
        reach.into_iter().map(|r| !r).collect()
    }

    /// Expected terminal reward from every state; non-terminating runs pay 0.
    /// Result is indexed `[state][dim]`.
    pub fn values(&self) -> Result<Vec<Vec<Q>>> {
        let n = self.rows.len();
        let zero = self.zero_reach();
        let mut out = vec![vec![Q::zero(); self.dims]; n];
        // transient states with positive reach probability
        let mut slot = vec![usize::MAX; n];
        let mut transient = Vec::new();
        for (s, row) in self.rows.iter().enumerate() {
            match row {
                Row::Terminal(r) => out[s] = r.clone(),
                Row::Step(_) if !zero[s] => {
                    slot[s] = transient.len();
                    transient.push(s);
                }
                Row::Step(_) => {}
            }
        }
        let m = transient.len();
        if m == 0 {
            return Ok(out);
        }
        // (I - P_TT) x = P_TF nu
        let mut a = vec![vec![Q::zero(); m]; m];
        let mut b = vec![vec![Q::zero(); self.dims]; m];
        for (r, &s) in transient.iter().enumerate() {
            a[r][r] = Q::one();
            let Row::Step(d) = &self.rows[s] else { unreachable!() };
            for (t, p) in d.entries() {
                match &self.rows[*t] {
                    Row::Terminal(nu) => {
                        for (k, v) in nu.iter().enumerate() {
                            b[r][k] += p * v;
                        }
                    }
                    Row::Step(_) if slot[*t] != usize::MAX => a[r][slot[*t]] -= p,
                    Row::Step(_) => {}
                }
            }
        }
        let x = solve_linear(a, b)?;
        for (r, &s) in transient.iter().enumerate() {
            out[s] = x[r].clone();
        }
        Ok(out)
    }
}

/// Gauss-Jordan elimination over the rationals with several right-hand sides.
pub fn solve_linear(mut a: Vec<Vec<Q>>, mut b: Vec<Vec<Q>>) -> Result<Vec<Vec<Q>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        for v in b[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        let pivot_rhs = b[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    a[r][c] -= &f * pv;
                }
            }
            for (k, pv) in pivot_rhs.iter().enumerate() {
                if !pv.is_zero() {
                    b[r][k] -= &f * pv;
                }
            }
        }
    }
    Ok(b)
}
