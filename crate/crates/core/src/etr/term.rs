//! Real-arithmetic terms and their SMT-LIB rendering.

use std::fmt;

use num::traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Num(Q),
    Add(Vec<Term>),
    Mul(Vec<Term>),
    Eq(Box<Term>, Box<Term>),
    Le(Box<Term>, Box<Term>),
    Lt(Box<Term>, Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    False,
}

pub fn var(name: impl Into<String>) -> Term {
    Term::Var(name.into())
}

pub fn num(x: Q) -> Term {
    Term::Num(x)
}

/// Sum with constants folded and zeros dropped.
pub fn add(parts: Vec<Term>) -> Term {
    let mut constant = Q::zero();
    let mut rest = Vec::new();
    for p in parts {
        match p {
            Term::Num(x) => constant += x,
            Term::Add(inner) => rest.extend(inner),
            other => rest.push(other),
        }
    }
    if !constant.is_zero() || rest.is_empty() {
        rest.push(Term::Num(constant));
    }
    if rest.len() == 1 {
        rest.pop().unwrap()
    } else {
        Term::Add(rest)
    }
}

/// Product with constants folded; a zero factor gives 0.
pub fn mul(parts: Vec<Term>) -> Term {
    let mut constant = Q::one();
    let mut rest = Vec::new();
    for p in parts {
        match p {
            Term::Num(x) => constant *= x,
            Term::Mul(inner) => rest.extend(inner),
            other => rest.push(other),
        }
    }
    if constant.is_zero() {
        return Term::Num(constant);
    }
    if !constant.is_one() || rest.is_empty() {
        rest.insert(0, Term::Num(constant));
    }
    if rest.len() == 1 {
        rest.pop().unwrap()
    } else {
        Term::Mul(rest)
    }
}

pub fn eq(a: Term, b: Term) -> Term {
    Term::Eq(Box::new(a), Box::new(b))
}

pub fn le(a: Term, b: Term) -> Term {
    Term::Le(Box::new(a), Box::new(b))
}

pub fn lt(a: Term, b: Term) -> Term {
    Term::Lt(Box::new(a), Box::new(b))
}

pub fn and(parts: Vec<Term>) -> Term {
    Term::And(parts)
}

pub fn or(parts: Vec<Term>) -> Term {
    Term::Or(parts)
}

impl Term {
    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Num(_) | Term::False => 1,
            Term::Add(v) | Term::Mul(v) | Term::And(v) | Term::Or(v) => {
                1 + v.iter().map(Term::size).sum::<usize>()
            }
            Term::Eq(a, b) | Term::Le(a, b) | Term::Lt(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Whether some product multiplies two non-constant factors.
    pub fn is_nonlinear(&self) -> bool {
        match self {
            Term::Var(_) | Term::Num(_) | Term::False => false,
            Term::Mul(v) => v.iter().filter(|t| !matches!(t, Term::Num(_))).count() > 1 || v.iter().any(Term::is_nonlinear),
            Term::Add(v) | Term::And(v) | Term::Or(v) => v.iter().any(Term::is_nonlinear),
            Term::Eq(a, b) | Term::Le(a, b) | Term::Lt(a, b) => a.is_nonlinear() || b.is_nonlinear(),
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, x: &Q) -> fmt::Result {
    let body = |f: &mut fmt::Formatter<'_>, x: &Q| {
        if x.is_integer() {
            write!(f, "{}.0", x.numer())
        } else {
            write!(f, "(/ {}.0 {}.0)", x.numer(), x.denom())
        }
    };
    if x.is_negative() {
        write!(f, "(- ")?;
        body(f, &-x.clone())?;
        write!(f, ")")
    } else {
        body(f, x)
    }
}

fn write_nary(f: &mut fmt::Formatter<'_>, op: &str, parts: &[Term]) -> fmt::Result {
    write!(f, "({op}")?;
    for p in parts {
        write!(f, " {p}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Num(x) => write_num(f, x),
            Term::Add(v) => write_nary(f, "+", v),
            Term::Mul(v) => write_nary(f, "*", v),
            Term::And(v) if v.is_empty() => write!(f, "true"),
            Term::And(v) => write_nary(f, "and", v),
            Term::Or(v) if v.is_empty() => write!(f, "false"),
            Term::Or(v) => write_nary(f, "or", v),
            Term::Eq(a, b) => write!(f, "(= {a} {b})"),
            Term::Le(a, b) => write!(f, "(<= {a} {b})"),
            Term::Lt(a, b) => write!(f, "(< {a} {b})"),
            Term::False => write!(f, "false"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn folding_and_rendering() {
        let t = add(vec![num(q(1, 2)), mul(vec![num(qi(2)), var("x")]), num(q(1, 2))]);
        assert_eq!(t.to_string(), "(+ (* 2.0 x) 1.0)");
        assert_eq!(mul(vec![num(qi(0)), var("x")]), num(qi(0)));
        assert_eq!(num(q(-3, 4)).to_string(), "(- (/ 3.0 4.0))");
        assert!(mul(vec![var("x"), var("y")]).is_nonlinear());
        assert!(!mul(vec![num(qi(3)), var("y")]).is_nonlinear());
        assert_eq!(le(var("x"), num(qi(1))).size(), 3);
    }
}
