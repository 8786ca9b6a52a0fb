//! Reading `(get-model)` output.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{rationalize_f64, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Solver(msg.into())
}

pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>> {
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().filter(|_| !stack.is_empty()).ok_or_else(|| bad("unbalanced ')'"))?;
                stack.last_mut().unwrap().push(SExpr::List(done));
            }
            ';' => {
                while chars.next_if(|c| *c != '\n').is_some() {}
            }
            '"' | '|' => {
                let mut atom = String::new();
                for d in chars.by_ref() {
                    if d == c {
                        break;
                    }
                    atom.push(d);
                }
                stack.last_mut().unwrap().push(SExpr::Atom(atom));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = c.to_string();
                while let Some(d) = chars.next_if(|d| !d.is_whitespace() && *d != '(' && *d != ')') {
                    atom.push(d);
                }
                stack.last_mut().unwrap().push(SExpr::Atom(atom));
            }
        }
    }
    if stack.len() != 1 {
        return Err(bad("unbalanced '('"));
    }
    Ok(stack.pop().unwrap())
}

/// Exact value of a decimal numeral; a trailing `?` (truncated output) is dropped.
fn parse_decimal(text: &str) -> Result<Q> {
    let t = text.trim_end_matches('?');
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(format!("not a number: {text}")));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad(text))?;
    Ok(Q::new(digits, num::pow(BigInt::from(10), frac.len())))
}

/// Polynomial in one variable, lowest degree first.
fn polynomial(e: &SExpr) -> Result<Vec<f64>> {
    fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..a.len().max(b.len()))
            .map(|k| a.get(k).unwrap_or(&0.0) + b.get(k).unwrap_or(&0.0))
            .collect()
    }
    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    match e {
        SExpr::Atom(a) if a.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
            Ok(vec![crate::rational::to_f64(&parse_decimal(a)?)])
        }
        SExpr::Atom(_) => Ok(vec![0.0, 1.0]),
        SExpr::List(items) => {
            let op = match items.first() {
                Some(SExpr::Atom(op)) => op.as_str(),
                _ => return Err(bad("malformed polynomial")),
            };
            let args = items[1..].iter().map(polynomial).collect::<Result<Vec<_>>>()?;
            match (op, args.len()) {
                ("-", 1) => Ok(args[0].iter().map(|x| -x).collect()),
                ("-", _) => Ok(args[1..].iter().fold(args[0].clone(), |acc, b| {
                    add(&acc, &b.iter().map(|x| -x).collect::<Vec<_>>())
                })),
                ("+", _) => Ok(args.iter().fold(vec![0.0], |acc, b| add(&acc, b))),
                ("*", _) => Ok(args.iter().fold(vec![1.0], |acc, b| mul(&acc, b))),
                ("^", 2) => {
                    let k = args[1][0].round() as usize;
                    Ok((0..k).fold(vec![1.0], |acc, _| mul(&acc, &args[0])))
                }
                _ => Err(bad(format!("unsupported polynomial operator {op}"))),
            }
        }
    }
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// The `index`-th real root (1-based, ascending), found by scanning for sign
/// changes and bisecting.
fn real_root(p: &[f64], index: usize) -> Result<f64> {
    let mut p = p.to_vec();
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
    let lead = *p.last().unwrap();
    let bound = 1.0 + p[..p.len() - 1].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let steps = 200_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = horner(&p, x0);
    for k in 1..=steps {
        let x1 = -bound + h * k as f64;
        let f1 = horner(&p, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = horner(&p, m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
        .get(index.wrapping_sub(1))
        .copied()
        .ok_or_else(|| bad("root-obj index out of range"))
}

pub fn evaluate(e: &SExpr) -> Result<Q> {
    match e {
        SExpr::Atom(a) => parse_decimal(a),
        SExpr::List(items) => {
            let op = match items.first() {
                Some(SExpr::Atom(op)) => op.as_str(),
                _ => return Err(bad("malformed value")),
            };
            if op == "root-obj" {
                let idx = match items.get(2) {
                    Some(SExpr::Atom(k)) => k.parse::<usize>().map_err(|_| bad("root-obj index"))?,
                    _ => return Err(bad("root-obj index")),
                };
                let root = real_root(&polynomial(&items[1])?, idx)?;
                return rationalize_f64(root, 1_000_000_000_000).ok_or_else(|| bad("non-finite root"));
            }
            let args = items[1..].iter().map(evaluate).collect::<Result<Vec<_>>>()?;
            match (op, args.len()) {
                ("-", 1) => Ok(-args[0].clone()),
                ("-", n) if n > 1 => Ok(args[1..].iter().fold(args[0].clone(), |acc, b| acc - b)),
                ("+", _) => Ok(args.iter().fold(Q::zero(), |acc, b| acc + b)),
                ("*", _) => Ok(args.iter().fold(Q::one(), |acc, b| acc * b)),
                ("/", 2) if !args[1].is_zero() => Ok(&args[0] / &args[1]),
                ("to_real", 1) => Ok(args[0].clone()),
                _ => Err(bad(format!("unsupported value operator {op}"))),
            }
        }
    }
}

/// Real constants defined in a model, by name.
pub fn parse_model(text: &str) -> Result<BTreeMap<String, Q>> {
    let mut out = BTreeMap::new();
    fn walk(e: &SExpr, out: &mut BTreeMap<String, Q>) -> Result<()> {
        if let SExpr::List(items) = e {
            if let [SExpr::Atom(head), SExpr::Atom(name), SExpr::List(params), _sort, value] = items.as_slice() {
                if head == "define-fun" && params.is_empty() {
                    out.insert(name.clone(), evaluate(value)?);
                    return Ok(());
                }
            }
            for item in items {
                walk(item, out)?;
            }
        }
        Ok(())
    }
    for e in parse_sexprs(text)? {
        walk(&e, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, to_f64};

    #[test]
    fn z3_style_model() {
        let text = "sat\n(\n  (define-fun p_i0_s0_a1 () Real\n    (/ 1.0 10.0))\n  (define-fun u () Real (- (/ 4.0 5.0)))\n  (define-fun d () Real 0.25)\n  (define-fun r () Real (root-obj (+ (^ x 2) (- 2)) 2))\n)";
        let m = parse_model(text).unwrap();
        assert_eq!(m["p_i0_s0_a1"], q(1, 10));
        assert_eq!(m["u"], q(-4, 5));
        assert_eq!(m["d"], q(1, 4));
        assert!((to_f64(&m["r"]) - 2f64.sqrt()).abs() < 1e-9);
    }
}
