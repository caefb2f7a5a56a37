//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`FracQSeries`] lives on the exponent lattice `(1/N)Z`. Coefficients at
//! exponents below the truncation order are exact; everything at or above it
//! is unknown and never reported. Binary operations merge lattices to the lcm
//! of the denominators and propagate the honest truncation order.

pub mod classical;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, lcm};

pub type Exponent = Ratio<i64>;

#[derive(Clone, Debug)]
pub struct FracQSeries {
    den: i64,
    terms: BTreeMap<i64, BigRational>,
    truncation: Exponent,
}

impl FracQSeries {
    /// Builds a series from `(numerator, coefficient)` pairs on the lattice
    /// `(1/den)Z`. Zero coefficients and terms at or above `truncation` are
    /// dropped; repeated numerators are summed.
    pub fn new<I>(den: i64, terms: I, truncation: Exponent) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        assert!(den > 0, "exponent denominator must be positive");
        let mut map: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if Exponent::new(e, den) < truncation {
                *map.entry(e).or_insert_with(BigRational::zero) += c;
            }
        }
        map.retain(|_, c| !c.is_zero());
        FracQSeries {
            den,
            terms: map,
            truncation,
        }
    }

    /// Integer-exponent series `sum c_i q^(start + i)`.
    pub fn from_ints(start: i64, coeffs: &[i64], truncation: i64) -> Self {
        Self::new(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (start + i as i64, rational::int(c))),
            Exponent::from_integer(truncation),
        )
    }

    pub fn zero(den: i64, truncation: Exponent) -> Self {
        Self::new(den, std::iter::empty(), truncation)
    }

    pub fn one(truncation: Exponent) -> Self {
        Self::monomial(BigRational::one(), Exponent::zero(), truncation)
    }

    pub fn monomial(c: BigRational, exponent: Exponent, truncation: Exponent) -> Self {
        let den = *exponent.denom();
        Self::new(den, [(*exponent.numer(), c)], truncation)
    }

    pub fn exponent_denominator(&self) -> i64 {
        self.den
    }

    pub fn truncation(&self) -> Exponent {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored terms as `(exponent, coefficient)`, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (Exponent, &BigRational)> + '_ {
        let den = self.den;
        self.terms
            .iter()
            .map(move |(&e, c)| (Exponent::new(e, den), c))
    }

    /// Stored terms keyed by exponent numerator over [`Self::exponent_denominator`].
    pub fn numerator_terms(&self) -> &BTreeMap<i64, BigRational> {
        &self.terms
    }

    /// Coefficient of `q^exponent`, or `None` when the exponent is at or above
    /// the truncation order.
    pub fn coeff(&self, exponent: Exponent) -> Option<BigRational> {
        if exponent >= self.truncation {
            return None;
        }
        let scaled = exponent * self.den;
        if !scaled.is_integer() {
            return Some(BigRational::zero());
        }
        Some(
            self.terms
                .get(&scaled.to_integer())
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// Integer-exponent convenience for [`Self::coeff`].
    pub fn coeff_at(&self, n: i64) -> Option<BigRational> {
        self.coeff(Exponent::from_integer(n))
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms
            .keys()
            .next()
            .map(|&e| Exponent::new(e, self.den))
    }

    pub fn leading(&self) -> Option<(Exponent, &BigRational)> {
        self.terms
            .iter()
            .next()
            .map(|(&e, c)| (Exponent::new(e, self.den), c))
    }

    /// Re-expresses the series on the finer lattice `(1/den)Z`.
    pub fn with_denominator(&self, den: i64) -> Self {
        assert!(
            den % self.den == 0,
            "{den} is not a multiple of {}",
            self.den
        );
        let k = den / self.den;
        FracQSeries {
            den,
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e * k, c.clone()))
                .collect(),
            truncation: self.truncation,
        }
    }

    /// Moves to the coarsest lattice that still holds every stored exponent.
    pub fn reduce_denominator(&self) -> Self {
        let g = self
            .terms
            .keys()
            .fold(self.den, |g, &e| num_integer::gcd(g, e));
        FracQSeries {
            den: self.den / g,
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e / g, c.clone()))
                .collect(),
            truncation: self.truncation,
        }
    }

    /// Lowers the truncation order; asking for a higher one is a no-op.
    pub fn truncate(&self, order: Exponent) -> Self {
        if order >= self.truncation {
            return self.clone();
        }
        let den = self.den;
        FracQSeries {
            den,
            terms: self
                .terms
                .iter()
                .filter(|(&e, _)| Exponent::new(e, den) < order)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            truncation: order,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.den, self.truncation);
        }
        FracQSeries {
            den: self.den,
            terms: self.terms.iter().map(|(&e, x)| (e, x * c)).collect(),
            truncation: self.truncation,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = lcm(self.den, other.den);
        let (ka, kb) = (den / self.den, den / other.den);
        let truncation = self.truncation.min(other.truncation);
        let terms = self
            .terms
            .iter()
            .map(|(&e, c)| (e * ka, c.clone()))
            .chain(other.terms.iter().map(|(&e, c)| (e * kb, c.clone())));
        Self::new(den, terms, truncation)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cauchy product. The result is known below
    /// `min(T_a + v_b, T_b + v_a)` where `v` is the minimal exponent.
    pub fn mul(&self, other: &Self) -> Self {
        let den = lcm(self.den, other.den);
        let (ka, kb) = (den / self.den, den / other.den);
        let truncation = match (self.min_exponent(), other.min_exponent()) {
            (Some(va), Some(vb)) => (self.truncation + vb).min(other.truncation + va),
            (None, Some(vb)) => self.truncation + vb,
            (Some(va), None) => other.truncation + va,
            (None, None) => self.truncation + other.truncation,
        };
        let limit = truncation * den; // numerators must stay strictly below
        let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                let e = ea * ka + eb * kb;
                if Exponent::from_integer(e) >= limit {
                    break;
                }
                *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        FracQSeries {
            den,
            terms: out,
            truncation,
        }
    }

    /// Multiplicative inverse known below `min(order, T - 2v)`.
    pub fn invert(&self, order: Exponent) -> Result<Self> {
        let (v, c) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => {
                return Err(Error::NotInvertible(
                    "series is zero to its truncation order",
                ))
            }
        };
        let den = self.den;
        let truncation = order.min(self.truncation - v * 2);
        let v_num = v.numer() * (den / v.denom());
        // relative coefficients u_i = a_{v + i/den}
        let rel_len = ((self.truncation - v) * den).ceil().to_integer().max(0) as usize;
        let mut rel = vec![BigRational::zero(); rel_len];
        for (&e, x) in &self.terms {
            rel[(e - v_num) as usize] = x.clone();
        }
        let out_len = ((truncation + v) * den).ceil().to_integer().max(0) as usize;
        debug_assert!(out_len <= rel_len);
        let inv_c = c.recip();
        let mut b: Vec<BigRational> = Vec::with_capacity(out_len);
        for k in 0..out_len {
            if k == 0 {
                b.push(inv_c.clone());
                continue;
            }
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !rel[i].is_zero() && !b[k - i].is_zero() {
                    acc += &rel[i] * &b[k - i];
                }
            }
            b.push(-acc * &inv_c);
        }
        Ok(Self::new(
            den,
            b.into_iter()
                .enumerate()
                .map(|(k, x)| (k as i64 - v_num, x)),
            truncation,
        ))
    }

    /// Integer power by binary powering; negative powers go through
    /// [`Self::invert`] at the best available order.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            let rel = match self.min_exponent() {
                Some(v) => self.truncation - v,
                None => return Err(Error::NotInvertible("zero series to the power 0")),
            };
            return Ok(Self::one(rel));
        }
        let base = if e < 0 {
            let v = self.min_exponent().ok_or(Error::NotInvertible(
                "series is zero to its truncation order",
            ))?;
            self.invert(self.truncation - v * 2)?
        } else {
            self.clone()
        };
        let mut n = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Substitutes `tau -> s * tau`: every exponent and the truncation order
    /// are multiplied by `s`.
    pub fn rescale(&self, s: i64) -> Self {
        assert!(s > 0, "rescale factor must be positive");
        FracQSeries {
            den: self.den,
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e * s, c.clone()))
                .collect(),
            truncation: self.truncation * s,
        }
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(Exponent, &BigRational) -> bool,
    {
        let den = self.den;
        FracQSeries {
            den,
            terms: self
                .terms
                .iter()
                .filter(|(&e, c)| keep(Exponent::new(e, den), c))
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            truncation: self.truncation,
        }
    }

    /// True when every stored exponent is an integer.
    pub fn has_integral_exponents(&self) -> bool {
        self.terms.keys().all(|e| e % self.den == 0)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| {
            num_integer::Integer::lcm(&acc, c.denom())
        })
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// Equal truncation orders and equal coefficients at every exponent.
impl PartialEq for FracQSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.truncation != other.truncation || self.terms.len() != other.terms.len() {
            return false;
        }
        self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl Eq for FracQSeries {}

impl fmt::Display for FracQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || e.is_zero();
            if show_coeff {
                write!(f, "{}", rational::to_text(&mag))?;
            }
            if !e.is_zero() {
                if show_coeff {
                    write!(f, "*")?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", rational::small_to_text(&e))?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", rational::small_to_text(&self.truncation))
    }
}

impl<'a> std::ops::Add<&'a FracQSeries> for &'a FracQSeries {
    type Output = FracQSeries;
    fn add(self, rhs: &'a FracQSeries) -> FracQSeries {
        FracQSeries::add(self, rhs)
    }
}

impl<'a> std::ops::Sub<&'a FracQSeries> for &'a FracQSeries {
    type Output = FracQSeries;
    fn sub(self, rhs: &'a FracQSeries) -> FracQSeries {
        FracQSeries::sub(self, rhs)
    }
}

impl<'a> std::ops::Mul<&'a FracQSeries> for &'a FracQSeries {
    type Output = FracQSeries;
    fn mul(self, rhs: &'a FracQSeries) -> FracQSeries {
        FracQSeries::mul(self, rhs)
    }
}

impl std::ops::Neg for &FracQSeries {
    type Output = FracQSeries;
    fn neg(self) -> FracQSeries {
        FracQSeries::neg(self)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    exponent_denominator: i64,
    truncation_num: i64,
    truncation_den: i64,
    terms: Vec<(i64, String)>,
}

impl Serialize for FracQSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            exponent_denominator: self.den,
            truncation_num: *self.truncation.numer(),
            truncation_den: *self.truncation.denom(),
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, rational::to_text(c)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FracQSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.exponent_denominator <= 0 || repr.truncation_den <= 0 {
            return Err(D::Error::custom("denominators must be positive"));
        }
        let truncation = Exponent::new(repr.truncation_num, repr.truncation_den);
        let mut terms = Vec::with_capacity(repr.terms.len());
        let mut last = None;
        for (e, c) in repr.terms {
            if last.is_some_and(|l| e <= l) {
                return Err(D::Error::custom(
                    "terms must be strictly ascending by exponent",
                ));
            }
            last = Some(e);
            if Exponent::new(e, repr.exponent_denominator) >= truncation {
                return Err(D::Error::custom(format!(
                    "term with exponent numerator {e} lies at or above the truncation order"
                )));
            }
            terms.push((e, rational::parse(&c).map_err(D::Error::custom)?));
        }
        Ok(FracQSeries::new(
            repr.exponent_denominator,
            terms,
            truncation,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ex(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    #[test]
    fn additive_cancellation() {
        let a = FracQSeries::from_ints(-1, &[1, 5], 10);
        let b = FracQSeries::from_ints(0, &[-5], 10);
        assert_eq!(a.add(&b), FracQSeries::from_ints(-1, &[1], 10));
        let zero = FracQSeries::zero(1, ex(10, 1));
        assert_eq!(a.add(&zero), a);
        let c = FracQSeries::from_ints(0, &[1, 6], 10);
        let d = FracQSeries::from_ints(0, &[1, -6], 10);
        assert_eq!(c.add(&d), FracQSeries::from_ints(0, &[2], 10));
    }

    #[test]
    fn truncation_is_minimum_for_addition() {
        let a = FracQSeries::from_ints(0, &[1, 2, 3], 3);
        let b = FracQSeries::from_ints(0, &[1], 1);
        let s = a.add(&b);
        assert_eq!(s.truncation(), ex(1, 1));
        assert_eq!(s.coeff_at(0), Some(int(2)));
        assert_eq!(s.coeff_at(1), None);
    }

    #[test]
    fn lattice_merge_in_product() {
        let a = FracQSeries::monomial(int(1), ex(1, 24), ex(2, 1));
        let b = FracQSeries::monomial(int(1), ex(-1, 24), ex(2, 1));
        let p = a.mul(&b);
        assert_eq!(p.coeff(ex(0, 1)), Some(int(1)));
        assert_eq!(p.len(), 1);
        // product known below min(2 - 1/24, 2 + 1/24)
        assert_eq!(p.truncation(), ex(47, 24));
    }

    #[test]
    fn geometric_series_times_one_minus_q() {
        let geo = FracQSeries::from_ints(0, &[1; 20], 20);
        let one_minus_q = FracQSeries::from_ints(0, &[1, -1], 20);
        let p = geo.mul(&one_minus_q);
        assert_eq!(p, FracQSeries::one(ex(20, 1)));
    }

    #[test]
    fn invert_examples() {
        let one_minus_q = FracQSeries::from_ints(0, &[1, -1], 12);
        let inv = one_minus_q.invert(ex(12, 1)).unwrap();
        assert_eq!(inv, FracQSeries::from_ints(0, &[1; 12], 12));

        let q = FracQSeries::from_ints(1, &[1], 30);
        let inv = q.invert(ex(5, 1)).unwrap();
        assert_eq!(inv.leading(), Some((ex(-1, 1), &int(1))));
        assert_eq!(inv.len(), 1);

        let zero = FracQSeries::zero(1, ex(4, 1));
        assert!(zero.invert(ex(4, 1)).is_err());
    }

    #[test]
    fn inverse_truncation_accounts_for_shift() {
        // q + q^2 + O(q^5): relative precision 4, inverse known below q^3
        let a = FracQSeries::from_ints(1, &[1, 1, 0, 0], 5);
        let b = a.invert(ex(100, 1)).unwrap();
        assert_eq!(b.truncation(), ex(3, 1));
        assert_eq!(a.mul(&b), FracQSeries::one(ex(4, 1)));
    }

    #[test]
    fn binomial_power() {
        let one_minus_q = FracQSeries::from_ints(0, &[1, -1], 6);
        let p = one_minus_q.pow(24).unwrap();
        assert_eq!(p.coeff_at(1), Some(int(-24)));
        assert_eq!(p.coeff_at(2), Some(int(276)));
        assert_eq!(p.coeff_at(3), Some(int(-2024)));
        assert_eq!(one_minus_q.pow(1).unwrap(), one_minus_q);
        let inv = one_minus_q.pow(-2).unwrap();
        assert_eq!(inv.coeff_at(4), Some(int(5)));
    }

    #[test]
    fn rescale_scales_exponents_only() {
        let j_like = FracQSeries::from_ints(-1, &[1, 744, 196884], 2);
        let r = j_like.rescale(5);
        assert_eq!(r.coeff_at(-5), Some(int(1)));
        assert_eq!(r.coeff_at(0), Some(int(744)));
        assert_eq!(r.coeff_at(5), Some(int(196884)));
        assert_eq!(r.coeff_at(1), Some(int(0)));
        assert_eq!(r.truncation(), ex(10, 1));
        assert_eq!(j_like.rescale(1), j_like);
    }

    #[test]
    fn coefficient_access_refuses_beyond_truncation() {
        let a = FracQSeries::new(5, [(4, rat(1, 2))], ex(1, 1));
        assert_eq!(a.coeff(ex(4, 5)), Some(rat(1, 2)));
        assert_eq!(a.coeff(ex(1, 2)), Some(int(0)));
        assert_eq!(a.coeff(ex(1, 1)), None);
    }

    #[test]
    fn json_format() {
        let a = FracQSeries::new(5, [(-5, rat(1, 2)), (0, int(15)), (4, int(-3))], ex(3, 1));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"exponent_denominator":5,"truncation_num":3,"truncation_den":1,"terms":[[-5,"1/2"],[0,"15"],[4,"-3"]]}"#
        );
        let back: FracQSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let alt: FracQSeries = serde_json::from_str(
            r#"{"exponent_denominator":1,"truncation_num":2,"truncation_den":1,"terms":[[0,"7/1"]]}"#,
        )
        .unwrap();
        assert_eq!(alt.coeff_at(0), Some(int(7)));
        let unsorted = r#"{"exponent_denominator":1,"truncation_num":5,"truncation_den":1,"terms":[[2,"1"],[0,"1"]]}"#;
        assert!(serde_json::from_str::<FracQSeries>(unsorted).is_err());
    }

    #[test]
    fn display() {
        let a = FracQSeries::from_ints(-1, &[1, 5, -11], 2);
        assert_eq!(a.to_string(), "q^-1 + 5 - 11*q + O(q^2)");
    }
}
