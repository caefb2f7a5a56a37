//! Classical level-one building blocks: eta, Delta, E4, E6, j and J.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Exponent, FracQSeries};

/// Sum of `d^k` over the positive divisors of `n`.
pub fn sigma(n: u64, k: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    acc
}

fn integer_bound(prec: Exponent) -> i64 {
    // number of integer exponents n >= 0 with n < prec
    prec.ceil().to_integer().max(0)
}

/// `q^(1/24) prod_{n>=1} (1 - q^n)` below `prec`, on the lattice `(1/24)Z`.
///
/// The product is expanded with Euler's pentagonal number theorem.
pub fn dedekind_eta(prec: Exponent) -> FracQSeries {
    assert!(prec > Exponent::zero(), "precision must be positive");
    // q^(1/24) q^n has numerator 1 + 24 n
    let limit = (prec * 24).ceil().to_integer();
    let mut terms = Vec::new();
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let candidates: &[i64] = if k == 0 {
            &[0]
        } else {
            &[k * (3 * k - 1) / 2, k * (3 * k + 1) / 2]
        };
        for &n in candidates {
            if 1 + 24 * n < limit {
                terms.push((1 + 24 * n, BigRational::from_integer(BigInt::from(sign))));
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    FracQSeries::new(24, terms, prec)
}

/// `Delta = q prod_{n>=1} (1 - q^n)^24` below `prec`, expanded directly.
pub fn discriminant_delta(prec: Exponent) -> FracQSeries {
    assert!(prec > Exponent::zero(), "precision must be positive");
    let len = integer_bound(prec - 1) as usize; // coefficients of the product part
    let mut c = vec![BigInt::zero(); len.max(1)];
    c[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let t = c[i - n].clone();
                c[i] -= t;
            }
        }
    }
    FracQSeries::new(
        1,
        c.into_iter()
            .take(len)
            .enumerate()
            .map(|(i, x)| (i as i64 + 1, BigRational::from_integer(x))),
        prec,
    )
}

fn eisenstein_level_one(prec: Exponent, k: u32, factor: i64) -> FracQSeries {
    let len = integer_bound(prec);
    let terms = (0..len).map(|n| {
        let c = if n == 0 {
            BigInt::one()
        } else {
            sigma(n as u64, k - 1) * factor
        };
        (n, BigRational::from_integer(c))
    });
    FracQSeries::new(1, terms, prec)
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn eisenstein_e4(prec: Exponent) -> FracQSeries {
    eisenstein_level_one(prec, 4, 240)
}

/// `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein_e6(prec: Exponent) -> FracQSeries {
    eisenstein_level_one(prec, 6, -504)
}

/// Quasimodular `E2 = 1 - 24 sum sigma(n) q^n`.
pub fn eisenstein_e2(prec: Exponent) -> FracQSeries {
    eisenstein_level_one(prec, 2, -24)
}

/// `j = E4^3 / Delta`.
pub fn klein_j(prec: Exponent) -> FracQSeries {
    let work = prec + 2;
    let e4 = eisenstein_e4(work);
    let num = e4.mul(&e4).mul(&e4);
    let inv = discriminant_delta(work)
        .invert(work)
        .expect("Delta has leading coefficient 1");
    num.mul(&inv).truncate(prec)
}

/// `J = E4 E6 / Delta`, the weight -2 form with expansion `q^-1 - 240 + ...`.
pub fn weight_minus2_j(prec: Exponent) -> FracQSeries {
    let work = prec + 2;
    let num = eisenstein_e4(work).mul(&eisenstein_e6(work));
    let inv = discriminant_delta(work)
        .invert(work)
        .expect("Delta has leading coefficient 1");
    num.mul(&inv).truncate(prec)
}
