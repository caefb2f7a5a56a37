//! Helpers for exact rationals and their canonical text form.
//!
//! Rationals are written as `"n"` when the denominator is one and `"p/q"`
//! otherwise, with no whitespace. Readers also accept `"n/1"`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_text(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<BigRational> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(Error::Format(format!("bad rational {s:?}")));
    }
    let value = match s.split_once('/') {
        None => BigRational::from_integer(parse_int(s)?),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() || d.is_negative() {
                return Err(Error::Format(format!("bad denominator in {s:?}")));
            }
            BigRational::new(n, d)
        }
    };
    Ok(value)
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s).map_err(|_| Error::Format(format!("bad integer {s:?}")))
}

pub fn small_to_text(x: &Ratio<i64>) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_small(s: &str) -> Result<Ratio<i64>> {
    let big = parse(s)?;
    match (big.numer().to_i64(), big.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Ratio::new(n, d)),
        _ => Err(Error::Format(format!("rational {s:?} out of range"))),
    }
}

/// Largest integer not exceeding `x`.
pub fn floor_small(x: Ratio<i64>) -> i64 {
    x.floor().to_integer()
}

/// Smallest integer strictly greater than or equal to `x`.
pub fn ceil_small(x: Ratio<i64>) -> i64 {
    x.ceil().to_integer()
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// `Some(n)` when `x` is an integer.
pub fn as_integer(x: &BigRational) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}

pub fn binomial(c: &BigInt, k: u64) -> BigInt {
    // generalized binomial coefficient c(c-1)...(c-k+1)/k! for any integer c
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= c - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}
