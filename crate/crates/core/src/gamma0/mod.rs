//! Scalar modular forms for `Gamma_0(p)` with character `chi_p`.
//!
//! Forms are stored as integer-exponent [`FracQSeries`] tagged with level,
//! weight, plus/minus sign and holomorphy class. The plus space `A_k^+`
//! consists of forms with `a(n) = 0` whenever `chi_p(n) = -1`, the minus space
//! of those with `a(n) = 0` whenever `chi_p(n) = +1`.

pub mod construct;
pub mod eisenstein;
pub mod fricke;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::character::{legendre_chi, require_odd_prime};
use crate::error::{Error, Result};
use crate::rational;
use crate::series::{Exponent, FracQSeries};

pub use construct::{
    construct_f1_p5, construct_f4_p5, construct_f5_p5, construct_fm, construct_fm_p5,
    reduce_to_principal_part,
};
pub use eisenstein::{
    eisenstein_coefficient, eisenstein_e2_level5, eisenstein_e_delta, eisenstein_g, eisenstein_h,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
    Unknown,
}

impl Sign {
    pub fn from_i32(s: i32) -> Self {
        match s.signum() {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => Sign::Unknown,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::Unknown => 0,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sign::Unknown => s.serialize_str("unknown"),
            other => s.serialize_i32(other.as_i32()),
        }
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) if n.as_i64() == Some(1) => Ok(Sign::Plus),
            serde_json::Value::Number(n) if n.as_i64() == Some(-1) => Ok(Sign::Minus),
            serde_json::Value::String(s) if s == "unknown" => Ok(Sign::Unknown),
            other => Err(D::Error::custom(format!("bad sign {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holomorphy {
    NearlyHolomorphic,
    Holomorphic,
    Cusp,
}

/// Multiplicity `s(n)`: 2 when `p | n`, 1 otherwise.
pub fn s_multiplicity(n: i64, p: i64) -> i64 {
    if n % p == 0 {
        2
    } else {
        1
    }
}

/// Whether the coefficient at `n` is allowed for sign `eps`.
fn allowed(n: i64, p: i64, eps: i32) -> bool {
    legendre_chi(n, p) != -eps
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarForm {
    p: i64,
    weight: i64,
    sign: Sign,
    holomorphy: Holomorphy,
    series: FracQSeries,
}

impl ScalarForm {
    /// Validates the sign support condition and holomorphy class to the
    /// series' truncation order.
    pub fn new(
        p: i64,
        weight: i64,
        sign: Sign,
        holomorphy: Holomorphy,
        series: FracQSeries,
    ) -> Result<Self> {
        require_odd_prime(p)?;
        if !series.has_integral_exponents() {
            return Err(Error::invalid("scalar forms need integral exponents"));
        }
        let series = if series.exponent_denominator() == 1 {
            series
        } else {
            series.reduce_denominator().with_denominator(1)
        };
        if sign != Sign::Unknown {
            let eps = sign.as_i32();
            if let Some((e, _)) = series
                .iter()
                .find(|(e, _)| !allowed(e.to_integer(), p, eps))
            {
                return Err(Error::invalid(format!(
                    "coefficient at q^{e} violates the {} space condition",
                    if eps > 0 { "plus" } else { "minus" }
                )));
            }
        }
        match holomorphy {
            Holomorphy::NearlyHolomorphic => {}
            Holomorphy::Holomorphic | Holomorphy::Cusp => {
                if series.min_exponent().is_some_and(|v| v < Exponent::zero()) {
                    return Err(Error::invalid("holomorphic form has negative exponents"));
                }
                if holomorphy == Holomorphy::Cusp
                    && series.coeff_at(0).is_some_and(|c| !c.is_zero())
                {
                    return Err(Error::invalid("cusp form has nonzero constant term"));
                }
            }
        }
        Ok(ScalarForm {
            p,
            weight,
            sign,
            holomorphy,
            series,
        })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn holomorphy(&self) -> Holomorphy {
        self.holomorphy
    }

    pub fn series(&self) -> &FracQSeries {
        &self.series
    }

    pub fn into_series(self) -> FracQSeries {
        self.series
    }

    /// Coefficient `a(n)`; `None` at or above the truncation order.
    pub fn coeff(&self, n: i64) -> Option<BigRational> {
        self.series.coeff_at(n)
    }

    pub fn truncation(&self) -> i64 {
        self.series.truncation().ceil().to_integer()
    }

    /// Deepest pole order (0 for holomorphic forms).
    pub fn pole_order(&self) -> i64 {
        self.series
            .min_exponent()
            .map(|v| (-v.to_integer()).max(0))
            .unwrap_or(0)
    }

    pub fn principal_part(&self) -> Result<PrincipalPart> {
        let eps = match self.sign {
            Sign::Unknown => return Err(Error::invalid("principal part needs a plus/minus sign")),
            s => s.as_i32(),
        };
        let terms = self
            .series
            .iter()
            .filter(|(e, _)| *e < Exponent::zero())
            .map(|(e, c)| (e.to_integer(), c.clone()));
        PrincipalPart::new(self.p, eps, self.weight, terms)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        ScalarForm {
            series: self.series.truncate(Exponent::from_integer(prec)),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        ScalarForm {
            series: self.series.scale(c),
            ..self.clone()
        }
    }

    pub fn with_sign(self, sign: Sign) -> Result<Self> {
        Self::new(self.p, self.weight, sign, self.holomorphy, self.series)
    }
}

/// Wire form: header fields plus the series block.
#[derive(Serialize, Deserialize)]
struct ScalarFormRepr {
    p: i64,
    weight: i64,
    sign: Sign,
    holomorphy: Holomorphy,
    series: FracQSeries,
}

impl Serialize for ScalarForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarFormRepr {
            p: self.p,
            weight: self.weight,
            sign: self.sign,
            holomorphy: self.holomorphy,
            series: self.series.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ScalarFormRepr::deserialize(d)?;
        ScalarForm::new(r.p, r.weight, r.sign, r.holomorphy, r.series).map_err(D::Error::custom)
    }
}

/// Prescribed principal part `sum_{n<0} a(n) q^n` of a form in `A_k^eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    p: i64,
    sign: i32,
    weight: i64,
    terms: BTreeMap<i64, BigRational>,
}

impl PrincipalPart {
    pub fn new<I>(p: i64, sign: i32, weight: i64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        require_odd_prime(p)?;
        if sign != 1 && sign != -1 {
            return Err(Error::invalid("principal part sign must be +1 or -1"));
        }
        let mut map = BTreeMap::new();
        for (n, c) in terms {
            if n >= 0 {
                return Err(Error::invalid(format!(
                    "principal part term at q^{n} is not a pole"
                )));
            }
            if c.is_zero() {
                continue;
            }
            if !allowed(n, p, sign) {
                return Err(Error::invalid(format!(
                    "principal part term at q^{n} violates the sign condition (chi_{p}({n}) = {})",
                    -sign
                )));
            }
            map.insert(n, c);
        }
        Ok(PrincipalPart {
            p,
            sign,
            weight,
            terms: map,
        })
    }

    /// `s(m)^-1 q^-m`, the principal part of `f_m`.
    pub fn for_fm(p: i64, m: i64) -> Result<Self> {
        if m <= 0 {
            return Err(Error::invalid("m must be positive"));
        }
        if legendre_chi(m, p) == -1 {
            return Err(Error::CharacterVanishes { m, p });
        }
        Self::new(p, 1, 0, [(-m, rational::rat(1, s_multiplicity(m, p)))])
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigRational> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Deepest pole order, 0 if empty.
    pub fn depth(&self) -> i64 {
        self.terms.keys().next().map(|n| -n).unwrap_or(0)
    }

    pub fn coeff(&self, n: i64) -> BigRational {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

#[derive(Serialize, Deserialize)]
struct PrincipalPartRepr {
    p: i64,
    sign: i32,
    #[serde(default)]
    weight: i64,
    terms: Vec<(i64, String)>,
}

impl Serialize for PrincipalPart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PrincipalPartRepr {
            p: self.p,
            sign: self.sign,
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|(&n, c)| (n, rational::to_text(c)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrincipalPart {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PrincipalPartRepr::deserialize(d)?;
        let terms = r
            .terms
            .iter()
            .map(|(n, c)| Ok((*n, rational::parse(c)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PrincipalPart::new(r.p, r.sign, r.weight, terms).map_err(D::Error::custom)
    }
}

/// `f | U_p = p^(1 - k/2) sum_{n = 0 mod p} a(n) q^(n/p)`.
pub fn hecke_up(f: &ScalarForm) -> Result<ScalarForm> {
    if f.weight % 2 != 0 {
        return Err(Error::invalid("U_p needs even weight"));
    }
    let p = f.p;
    let power = 1 - f.weight / 2;
    let factor = if power >= 0 {
        BigRational::from_integer(BigInt::from(p).pow(power as u32))
    } else {
        BigRational::from_integer(BigInt::from(p).pow((-power) as u32)).recip()
    };
    let terms = f
        .series
        .numerator_terms()
        .iter()
        .filter(|(n, _)| *n % p == 0)
        .map(|(n, c)| (n / p, c * &factor));
    let truncation = f.series.truncation() / p;
    // coefficients strictly below T/p are known; re-normalize to integers
    let series = FracQSeries::new(1, terms, truncation);
    ScalarForm::new(p, f.weight, Sign::Unknown, f.holomorphy, series)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignVerdict {
    Plus,
    Minus,
    Mixed,
}

/// Which of the plus/minus spaces the stored coefficients are compatible with.
pub fn plus_space_sign_check(f: &FracQSeries, p: i64) -> SignVerdict {
    let mut has_plus = false;
    let mut has_minus = false;
    for (e, _) in f.iter() {
        if !e.is_integer() {
            return SignVerdict::Mixed;
        }
        match legendre_chi(e.to_integer(), p) {
            1 => has_plus = true,
            -1 => has_minus = true,
            _ => {}
        }
    }
    match (has_plus, has_minus) {
        (_, false) => SignVerdict::Plus,
        (false, true) => SignVerdict::Minus,
        (true, true) => SignVerdict::Mixed,
    }
}

/// Splits `f` into its restrictions to `chi_p(n) != -1` and `chi_p(n) != +1`.
///
/// Coefficients at multiples of `p` are not determined by the support
/// condition; the two restrictions share them and the decomposition of an
/// actual form into `A^+ + A^-` is fixed by the form, not by the series alone.
/// Here they are attributed to the plus part.
pub fn split_plus_minus(f: &FracQSeries, p: i64) -> (FracQSeries, FracQSeries) {
    let plus = f.filter(|e, _| legendre_chi(e.to_integer(), p) != -1);
    let minus = f.filter(|e, _| legendre_chi(e.to_integer(), p) == -1);
    (plus, minus)
}

/// `dim S_2(p, chi_p) = 2 floor((p - 5)/24)` for primes `p = 1 mod 4`.
pub fn dim_s2(p: i64) -> Result<i64> {
    crate::quadfield::require_one_mod_four(p)?;
    Ok(2 * (p - 5).div_euclid(24))
}

/// Dimension of the obstruction space `S_2^+(p, chi_p)`.
pub fn dim_s2_plus(p: i64) -> Result<i64> {
    Ok(dim_s2(p)? / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn multiplicity() {
        assert_eq!(s_multiplicity(10, 5), 2);
        assert_eq!(s_multiplicity(-10, 5), 2);
        assert_eq!(s_multiplicity(0, 5), 2);
        assert_eq!(s_multiplicity(9, 5), 1);
    }

    #[test]
    fn dimensions() {
        for p in [5, 13, 17] {
            assert_eq!(dim_s2(p).unwrap(), 0);
            assert_eq!(dim_s2_plus(p).unwrap(), 0);
        }
        assert_eq!(dim_s2(29).unwrap(), 2);
        assert_eq!(dim_s2_plus(29).unwrap(), 1);
        assert_eq!(dim_s2(53).unwrap(), 4);
        assert_eq!(dim_s2_plus(53).unwrap(), 2);
        assert!(dim_s2(7).is_err());
    }

    #[test]
    fn sign_checks() {
        let zero = FracQSeries::zero(1, Exponent::from_integer(10));
        assert_eq!(plus_space_sign_check(&zero, 5), SignVerdict::Plus);
        let plus = FracQSeries::from_ints(-1, &[1, 5, 11, 0, 0, -54], 5);
        assert_eq!(plus_space_sign_check(&plus, 5), SignVerdict::Plus);
        let minus = FracQSeries::from_ints(2, &[1, 3], 5);
        assert_eq!(plus_space_sign_check(&minus, 5), SignVerdict::Minus);
        let mixed = FracQSeries::from_ints(1, &[1, 1], 5);
        assert_eq!(plus_space_sign_check(&mixed, 5), SignVerdict::Mixed);
    }

    #[test]
    fn split_recovers_series() {
        let f = FracQSeries::from_ints(-1, &[1, 2, 3, 4, 5, 6, 7, 8], 7);
        let (plus, minus) = split_plus_minus(&f, 5);
        assert_eq!(plus.add(&minus), f);
        assert_eq!(plus_space_sign_check(&plus, 5), SignVerdict::Plus);
        assert_eq!(plus_space_sign_check(&minus, 5), SignVerdict::Minus);
    }

    #[test]
    fn scalar_form_validation() {
        let bad = FracQSeries::from_ints(2, &[1], 5);
        assert!(ScalarForm::new(5, 0, Sign::Plus, Holomorphy::NearlyHolomorphic, bad).is_err());
        let pole = FracQSeries::from_ints(-1, &[1], 5);
        assert!(ScalarForm::new(5, 0, Sign::Plus, Holomorphy::Holomorphic, pole).is_err());
        let constant = FracQSeries::from_ints(0, &[1], 5);
        assert!(ScalarForm::new(5, 2, Sign::Plus, Holomorphy::Cusp, constant).is_err());
    }

    #[test]
    fn up_on_coprime_support() {
        // only the constant term survives
        let f = FracQSeries::from_ints(0, &[3, 1, 0, 0, 1], 5);
        let f = ScalarForm::new(5, 0, Sign::Plus, Holomorphy::Holomorphic, f).unwrap();
        let g = hecke_up(&f).unwrap();
        assert_eq!(g.series().numerator_terms().len(), 1);
        assert_eq!(g.coeff(0), Some(int(15)));
        let odd = ScalarForm::new(
            5,
            1,
            Sign::Unknown,
            Holomorphy::Holomorphic,
            FracQSeries::from_ints(0, &[1], 5),
        )
        .unwrap();
        assert!(hecke_up(&odd).is_err());
    }

    #[test]
    fn up_after_rescale_is_scalar() {
        let f = FracQSeries::from_ints(0, &[1, 2, 0, 0, 7, 1], 6);
        let f = ScalarForm::new(5, 2, Sign::Unknown, Holomorphy::Holomorphic, f).unwrap();
        let v = ScalarForm::new(
            5,
            2,
            Sign::Unknown,
            Holomorphy::Holomorphic,
            f.series().rescale(5),
        )
        .unwrap();
        // p^(1 - k/2) = 1 for k = 2
        assert_eq!(hecke_up(&v).unwrap().series(), f.series());
    }

    #[test]
    fn principal_part_rules() {
        assert!(PrincipalPart::for_fm(5, 2).is_err());
        let pp = PrincipalPart::for_fm(5, 10).unwrap();
        assert_eq!(pp.coeff(-10), rational::rat(1, 2));
        assert!(PrincipalPart::new(5, 1, 0, [(-2, int(1))]).is_err());
        assert!(PrincipalPart::new(5, 1, 0, [(1, int(1))]).is_err());
    }
}
