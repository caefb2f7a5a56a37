//! Eisenstein series of weight `kappa >= 2` for `Gamma_0(p)` with character `chi_p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Holomorphy, ScalarForm, Sign};
use crate::character::{l_value_1_minus_kappa, legendre_chi, require_odd_prime};
use crate::error::{Error, Result};
use crate::series::classical::sigma;
use crate::series::{Exponent, FracQSeries};

fn divisors(n: i64) -> impl Iterator<Item = i64> {
    (1..=n).filter(move |d| n % d == 0)
}

/// `sum_{d | n} d^(kappa-1) chi_p(d)`.
fn sum_chi_d(n: i64, kappa: u32, p: i64) -> BigInt {
    divisors(n)
        .map(|d| BigInt::from(d).pow(kappa - 1) * legendre_chi(d, p))
        .sum()
}

/// `sum_{d | n} d^(kappa-1) chi_p(n/d)`.
fn sum_chi_codivisor(n: i64, kappa: u32, p: i64) -> BigInt {
    divisors(n)
        .map(|d| BigInt::from(d).pow(kappa - 1) * legendre_chi(n / d, p))
        .sum()
}

fn check_kappa(kappa: u32, p: i64) -> Result<()> {
    require_odd_prime(p)?;
    if kappa < 2 {
        return Err(Error::invalid("Eisenstein weight must be at least 2"));
    }
    Ok(())
}

/// `2 / L(1 - kappa, chi_p)`.
fn normalizer(kappa: u32, p: i64) -> Result<BigRational> {
    let l = l_value_1_minus_kappa(kappa, p)?;
    if l.is_zero() {
        return Err(Error::invalid(format!("L(1 - {kappa}, chi_{p}) vanishes")));
    }
    Ok(BigRational::from_integer(BigInt::from(2)) / l)
}

fn form(p: i64, kappa: u32, sign: Sign, terms: Vec<(i64, BigRational)>, prec: i64) -> ScalarForm {
    let series = FracQSeries::new(1, terms, Exponent::from_integer(prec));
    ScalarForm::new(p, kappa as i64, sign, Holomorphy::Holomorphic, series)
        .expect("Eisenstein series satisfy their own support conditions")
}

/// `G_kappa = 1 + (2/L(1-kappa, chi_p)) sum_n sum_{d|n} d^(kappa-1) chi_p(d) q^n`,
/// the Eisenstein series attached to the cusp at infinity.
pub fn eisenstein_g(kappa: u32, p: i64, prec: i64) -> Result<ScalarForm> {
    check_kappa(kappa, p)?;
    let c = normalizer(kappa, p)?;
    let mut terms = vec![(0, BigRational::one())];
    for n in 1..prec {
        terms.push((n, &c * BigRational::from_integer(sum_chi_d(n, kappa, p))));
    }
    Ok(form(p, kappa, Sign::Unknown, terms, prec))
}

/// `H_kappa = sum_n sum_{d|n} d^(kappa-1) chi_p(n/d) q^n`, attached to the cusp 0.
pub fn eisenstein_h(kappa: u32, p: i64, prec: i64) -> Result<ScalarForm> {
    check_kappa(kappa, p)?;
    let terms = (1..prec)
        .map(|n| (n, BigRational::from_integer(sum_chi_codivisor(n, kappa, p))))
        .collect();
    Ok(form(p, kappa, Sign::Unknown, terms, prec))
}

/// Coefficient `B(n)` of `E_kappa^delta` for `n >= 1`.
pub fn eisenstein_coefficient(kappa: u32, delta: i32, p: i64, n: i64) -> Result<BigRational> {
    check_kappa(kappa, p)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    if n < 0 {
        return Ok(BigRational::zero());
    }
    let c = normalizer(kappa, p)?;
    let s = sum_chi_d(n, kappa, p) + sum_chi_codivisor(n, kappa, p) * delta;
    Ok(c * BigRational::from_integer(s))
}

/// `E_kappa^delta = 1 + sum_n B(n) q^n`, an element of `M_kappa^delta(p, chi_p)`.
pub fn eisenstein_e_delta(kappa: u32, delta: i32, p: i64, prec: i64) -> Result<ScalarForm> {
    if delta != 1 && delta != -1 {
        return Err(Error::invalid("delta must be +1 or -1"));
    }
    check_kappa(kappa, p)?;
    let mut terms = vec![(0, BigRational::one())];
    for n in 1..prec {
        terms.push((n, eisenstein_coefficient(kappa, delta, p, n)?));
    }
    Ok(form(p, kappa, Sign::from_i32(delta), terms, prec))
}

/// `1 + 6 sum (sigma(n) - 5 sigma(n/5)) q^n`, the weight 2 Eisenstein series for
/// `Gamma_0(5)` with trivial character.
///
/// Returned as a bare series: it lives outside the `chi_5` spaces.
pub fn eisenstein_e2_level5(prec: i64) -> FracQSeries {
    let terms = (0..prec).map(|n| {
        let c = if n == 0 {
            BigInt::one()
        } else {
            let mut s = sigma(n as u64, 1);
            if n % 5 == 0 {
                s -= sigma((n / 5) as u64, 1) * 5;
            }
            s * 6
        };
        (n, BigRational::from_integer(c))
    });
    FracQSeries::new(1, terms, Exponent::from_integer(prec))
}
