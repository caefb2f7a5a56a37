//! Exact images under the Fricke involution `W_p` for the building blocks of
//! the level `p` forms: eta quotients and weight 2 Eisenstein combinations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{construct_f1_p5, hecke_up};
use crate::character::require_odd_prime;
use crate::error::{Error, Result};
use crate::quadfield::QFieldElem;
use crate::rational::{int, rat};
use crate::series::classical::{dedekind_eta, eisenstein_e2};
use crate::series::{Exponent, FracQSeries};

/// `eta(tau)^a eta(p tau)^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    pub p: i64,
    pub a: i64,
    pub b: i64,
}

impl EtaQuotient {
    pub fn new(p: i64, a: i64, b: i64) -> Result<Self> {
        require_odd_prime(p)?;
        if (a + b) % 4 != 0 {
            return Err(Error::invalid(
                "eta quotient must have even integral weight",
            ));
        }
        if (a + p * b) % 24 != 0 {
            return Err(Error::invalid(
                "eta quotient must have an integral q-expansion",
            ));
        }
        Ok(EtaQuotient { p, a, b })
    }

    pub fn weight(&self) -> i64 {
        (self.a + self.b) / 2
    }

    pub fn order_at_infinity(&self) -> i64 {
        (self.a + self.p * self.b) / 24
    }

    /// The expansion, known below `q^prec`.
    pub fn series(&self, prec: i64) -> Result<FracQSeries> {
        let mut extra = 2 + self.a.abs() / 24 + self.b.abs() * self.p / 24;
        loop {
            let work = Exponent::from_integer(prec + extra);
            let eta = dedekind_eta(work);
            let etap = eta.rescale(self.p);
            let x = eta.pow(self.a)?.mul(&etap.pow(self.b)?);
            if x.truncation() >= Exponent::from_integer(prec) {
                let x = x.reduce_denominator();
                if x.exponent_denominator() != 1 {
                    return Err(Error::invalid("eta quotient has fractional exponents"));
                }
                return Ok(x.truncate(Exponent::from_integer(prec)));
            }
            extra *= 2;
        }
    }

    /// `g |_k W_p = p^((a-b)/4) i^(-k) eta(tau)^b eta(p tau)^a`.
    pub fn fricke(&self) -> (QFieldElem, EtaQuotient) {
        let p = self.p;
        let diff = self.a - self.b;
        // p^(diff/4) with diff even
        let half = diff / 2;
        let mut scalar = if half % 2 == 0 {
            QFieldElem::from_rational(p, rational_power(p, half / 2))
        } else {
            QFieldElem::sqrt_p(p).scale(&rational_power(p, (half - 1) / 2))
        };
        if (self.weight() / 2) % 2 != 0 {
            scalar = scalar.neg();
        }
        let image = EtaQuotient {
            p,
            a: self.b,
            b: self.a,
        };
        (scalar, image)
    }
}

fn rational_power(p: i64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        base
    } else {
        base.recip()
    }
}

/// `c1 E_2(tau) + cp E_2(p tau)` with `c1 + cp/p = 0`, a holomorphic weight 2
/// form on `Gamma_0(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Combination {
    pub p: i64,
    pub c1: BigRational,
    pub cp: BigRational,
}

impl E2Combination {
    pub fn new(p: i64, c1: BigRational, cp: BigRational) -> Result<Self> {
        require_odd_prime(p)?;
        if !(&c1 + &cp / int(p)).is_zero() {
            return Err(Error::invalid("combination of E_2 is not modular"));
        }
        Ok(E2Combination { p, c1, cp })
    }

    /// The level 5 Eisenstein series `1 + 6 sum (sigma(n) - 5 sigma(n/5)) q^n`.
    pub fn level5() -> Self {
        E2Combination {
            p: 5,
            c1: rat(-1, 4),
            cp: rat(5, 4),
        }
    }

    pub fn series(&self, prec: i64) -> FracQSeries {
        let e2 = eisenstein_e2(Exponent::from_integer(prec));
        e2.scale(&self.c1).add(&e2.rescale(self.p).scale(&self.cp))
    }

    /// Image under `|_2 W_p`: `(cp/p) E_2(tau) + c1 p E_2(p tau)`.
    pub fn fricke(&self) -> E2Combination {
        let p = int(self.p);
        E2Combination {
            p: self.p,
            c1: &self.cp / &p,
            cp: &self.c1 * &p,
        }
    }
}

/// Outcome of comparing `f_1 | U_5` with `sqrt(5) f_1 | W_5`.
#[derive(Clone, Debug)]
pub struct FrickeCheck {
    pub lhs: FracQSeries,
    pub rhs: FracQSeries,
    /// Rational factor in `sqrt(5) f_1|W_5 = factor * E2|W_5 / G_2`.
    pub factor: BigRational,
    pub holds: bool,
}

/// Checks `f_1 | U_5 = eps eps_5 sqrt(5) f_1 | W_5` with `eps = eps_5 = 1` as an
/// exact identity of expansions below `q^order`.
pub fn f1_fricke_check(order: i64) -> Result<FrickeCheck> {
    let p = 5;
    let f1 = construct_f1_p5(p * order)?;
    let lhs = hecke_up(&f1)?.into_series();

    let e2 = E2Combination::level5();
    let e2_image = e2.fricke();
    // E2 |W5 is a multiple of E2 itself
    let e2_scalar = QFieldElem::one(p);
    let h2 = EtaQuotient::new(p, -1, 5)?;
    let (h2_scalar, h2_image) = h2.fricke();
    let work = order + 2;
    let den = h2_image.series(work)?;
    let ratio = e2_image
        .series(work)
        .mul(&den.invert(Exponent::from_integer(work))?);

    let total = QFieldElem::sqrt_p(p).mul(&e2_scalar).div(&h2_scalar)?;
    if !total.is_rational() {
        return Err(Error::invalid("Fricke factor is not rational"));
    }
    let factor = total.u.clone();
    let rhs = ratio.scale(&factor).truncate(Exponent::from_integer(order));
    let lhs = lhs.truncate(Exponent::from_integer(order));
    let holds = lhs == rhs;
    Ok(FrickeCheck {
        lhs,
        rhs,
        factor,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_and_g2_swap() {
        let h2 = EtaQuotient::new(5, -1, 5).unwrap();
        let (scalar, image) = h2.fricke();
        assert_eq!(image, EtaQuotient { p: 5, a: 5, b: -1 });
        // -5^(-3/2)
        assert_eq!(scalar, QFieldElem::sqrt_p(5).scale(&rat(-1, 25)));
        let (back, again) = image.fricke();
        assert_eq!(again, h2);
        assert_eq!(scalar.mul(&back), QFieldElem::one(5));
    }

    #[test]
    fn level5_e2_is_anti_invariant() {
        let e = E2Combination::level5();
        let image = e.fricke();
        assert_eq!(image.c1, -e.c1.clone());
        assert_eq!(image.cp, -e.cp.clone());
        assert_eq!(e.series(8).coeff_at(1), Some(int(6)));
    }

    #[test]
    fn non_modular_combination_rejected() {
        assert!(E2Combination::new(5, int(1), int(1)).is_err());
    }

    #[test]
    fn up_equals_fricke_for_f1() {
        let check = f1_fricke_check(10).unwrap();
        assert_eq!(check.factor, int(-25));
        assert!(check.holds);
        assert_eq!(check.lhs.coeff_at(0), Some(int(25)));
        assert_eq!(check.lhs.coeff_at(1), Some(int(275)));
    }
}
