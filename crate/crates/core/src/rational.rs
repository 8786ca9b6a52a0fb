//! Exact rational helpers.
//!
//! All probabilities and rewards in the model layer are [`Q`]. Text I/O uses
//! the grammar `-?digits(/digits)?`; decimals are rejected so that nothing is
//! silently rounded.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn parse_rational(text: &str) -> Result<Q> {
    let bad = || Error::BadRational(text.to_string());
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || !den.is_none_or(digits) {
        return Err(bad());
    }
    let mut n: BigInt = num.parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// `p/q`, or `p` for integers.
pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions with semiconvergents).
pub fn rationalize(x: &Q, max_den: u64) -> Q {
    let max_den = BigInt::from(max_den.max(1));
    if x.denom() <= &max_den {
        return x.clone();
    }
    let neg = x.is_negative();
    let x = x.abs();

    // convergents h/k
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = x.clone();
    loop {
        let a = rem.floor().to_integer();
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            // largest semiconvergent still within the bound
            let t = (&max_den - &k0) / &k1;
            let semi = Q::new(&t * &h1 + &h0, &t * &k1 + &k0);
            let conv = Q::new(h1.clone(), k1.clone());
            let best = if (&semi - &x).abs() < (&conv - &x).abs() {
                semi
            } else {
                conv
            };
            return if neg { -best } else { best };
        }
        let h2 = &a * &h1 + &h0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rem - Q::from_integer(a);
        if frac.is_zero() {
            let r = Q::new(h1, k1);
            return if neg { -r } else { r };
        }
        rem = frac.recip();
    }
}

/// Exact conversion of a finite float followed by [`rationalize`].
pub fn rationalize_f64(x: f64, max_den: u64) -> Option<Q> {
    Q::from_float(x).map(|r| rationalize(&r, max_den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-1").unwrap(), qi(-1));
        assert_eq!(parse_rational("6/4").unwrap(), q(3, 2));
        for bad in ["", "-", "0.5", "1/0", "1/", "/2", "+1", "1/-2", " 1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(format_rational(&q(-4, 5)), "-4/5");
        assert_eq!(format_rational(&qi(2)), "2");
    }

    #[test]
    fn best_approximation() {
        let pi = rationalize_f64(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, q(355, 113));
        assert_eq!(rationalize_f64(0.1, 1_000_000).unwrap(), q(1, 10));
        assert_eq!(rationalize_f64(-0.25, 10).unwrap(), q(-1, 4));
        assert_eq!(rationalize(&q(37, 57), 100), q(37, 57));
        // 1/3 + tiny perturbation snaps back
        let near = q(1, 3) + q(1, 10_000_000_000);
        assert_eq!(rationalize(&near, 1_000_000), q(1, 3));
    }
}
