//! Formal expansion of the product
//! `e(rho_W z1 + rho_W' z2) prod_{(nu, W) > 0} (1 - e(nu z1 + nu' z2))^(s(p nu nu') a(p nu nu'))`,
//! graded by `tr(nu d)` for a totally positive `d` inside the chamber.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::Serialize;

use super::{
    check_chamber_matches, exponent_at, poles, require_integral_divisor, require_weight_zero_plus,
    weyl_vector, WeylChamber,
};
use crate::error::{Error, Result};
use crate::gamma0::ScalarForm;
use crate::quadfield::{codiff_enumerate_pairing_bounded, CodiffElem, QFieldElem};
use crate::rational::{self, binomial, int, rat};

pub const REGION_RESTRICTED: &str = "region-restricted";
pub const WINDOW_ONLY: &str = "window-only";

/// Terms `c_nu e(nu z1 + nu' z2)` with `0 < tr(nu d) <= bound`, stored before
/// the shift by `rho_W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertExpansion {
    pub p: i64,
    pub rho: QFieldElem,
    /// `tr eps0`; `rho_W` lies in `(1/tr eps0) d^-1`.
    pub lattice_scale: BigRational,
    pub grading_direction: QFieldElem,
    pub grading_bound: i64,
    /// Coefficient of `e(rho_W z1 + rho_W' z2)` itself.
    pub constant: BigRational,
    pub terms: BTreeMap<CodiffElem, BigRational>,
    pub caveats: Vec<String>,
}

impl HilbertExpansion {
    pub fn pairing(&self, nu: &CodiffElem) -> BigRational {
        nu.pairing(&self.grading_direction)
    }

    pub fn coeff(&self, nu: &CodiffElem) -> BigRational {
        if nu.is_zero() {
            return self.constant.clone();
        }
        self.terms
            .get(nu)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in output order: by pairing, then by the coordinates of `nu`.
    pub fn sorted_terms(&self) -> Vec<(CodiffElem, &BigRational)> {
        let mut out: Vec<_> = self.terms.iter().map(|(nu, c)| (*nu, c)).collect();
        out.sort_by(|(a, _), (b, _)| {
            let (va, vb) = (a.value(), b.value());
            self.pairing(a)
                .cmp(&self.pairing(b))
                .then_with(|| va.u.cmp(&vb.u))
                .then_with(|| va.v.cmp(&vb.v))
        });
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        out.constant = &out.constant * c;
        out.terms = out
            .terms
            .into_iter()
            .map(|(nu, x)| (nu, x * c))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        out
    }

    fn coefficients(&self) -> impl Iterator<Item = &BigRational> {
        std::iter::once(&self.constant).chain(self.terms.values())
    }
}

#[derive(Serialize)]
struct TermRepr {
    nu: rational_pair::Pair,
    c: String,
}

mod rational_pair {
    use serde::Serialize;

    #[derive(Serialize)]
    pub struct Pair {
        pub u: String,
        pub v: String,
    }
}

impl Serialize for HilbertExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .sorted_terms()
            .into_iter()
            .map(|(nu, c)| {
                let r = nu.value().repr();
                TermRepr {
                    nu: rational_pair::Pair { u: r.u, v: r.v },
                    c: rational::to_text(c),
                }
            })
            .collect();
        let mut st = s.serialize_struct("HilbertExpansion", 7)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("rho", &self.rho.repr())?;
        st.serialize_field("grading_direction", &self.grading_direction.repr())?;
        st.serialize_field("grading_bound", &self.grading_bound)?;
        st.serialize_field("caveats", &self.caveats)?;
        st.serialize_field("constant", &rational::to_text(&self.constant))?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// The totally positive `d in O` of least trace with `(d, d')` inside `w`;
/// ties go to the smallest irrational part.
pub fn default_grading_direction(w: &WeylChamber) -> Result<QFieldElem> {
    let p = w.p();
    for a in 1..100_000i64 {
        // d = (a + b sqrt p)/2 with a = b mod 2 and b^2 p < a^2
        let bmax = ((a as f64) / (p as f64).sqrt()).ceil() as i64 + 1;
        for b in -bmax..=bmax {
            if (a - b).rem_euclid(2) != 0 {
                continue;
            }
            let d = QFieldElem::from_fraction(p, a, b, 2);
            if d.is_totally_positive() && w.contains(&d, &d.conj()) {
                return Ok(d);
            }
        }
    }
    Err(Error::invalid(
        "no grading direction found inside the chamber",
    ))
}

/// One factor `(1 - X^nu)^c` truncated to `k tr(nu d) <= bound`.
struct Factor {
    nu: CodiffElem,
    pairing: i64,
    coeffs: Vec<BigRational>,
    negative: bool,
}

fn to_i64(x: &BigRational) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::invalid(format!("pairing {x} is not an integer")));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| Error::invalid("pairing out of range"))
}

/// The Borcherds product of `f` on `w`, graded by `tr(nu d) <= bound`.
///
/// `direction` defaults to [`default_grading_direction`]. The coefficients of
/// `f` are needed up to `max p N(nu)` over the enumerated `nu`.
pub fn product_expansion(
    f: &ScalarForm,
    w: &WeylChamber,
    direction: Option<&QFieldElem>,
    bound: i64,
) -> Result<HilbertExpansion> {
    require_weight_zero_plus(f)?;
    require_integral_divisor(f)?;
    check_chamber_matches(w, f)?;
    let p = f.p();
    let d = match direction {
        Some(d) => d.clone(),
        None => default_grading_direction(w)?,
    };
    if !d.is_integral() || !d.is_totally_positive() || !w.contains(&d, &d.conj()) {
        return Err(Error::invalid(format!(
            "grading direction {d} must be a totally positive integer inside the chamber"
        )));
    }
    let rho = weyl_vector(f, w)?;
    let deepest = poles(f).first().map(|(n, _)| *n).unwrap_or(0);
    let floor = rat(deepest, p);
    let candidates = codiff_enumerate_pairing_bounded(p, &d, &int(bound), &floor)?;
    let needed = candidates
        .iter()
        .map(|nu| (nu.norm() * int(p)).to_integer())
        .max()
        .unwrap_or_else(BigInt::zero)
        + 1;
    if BigInt::from(f.truncation()) < needed {
        return Err(Error::InsufficientPrecision {
            needed: needed.to_string(),
            available: f.truncation().to_string(),
        });
    }
    let factors: Vec<Option<Factor>> = candidates
        .par_iter()
        .map(|nu| {
            if w.side(nu) != Ordering::Greater {
                return Ok(None);
            }
            let m = (nu.norm() * int(p))
                .to_integer()
                .to_i64()
                .expect("bounded by truncation");
            let c = exponent_at(f, m)
                .ok_or_else(|| Error::invalid(format!("s({m}) a({m}) is not an integer")))?;
            if c.is_zero() {
                return Ok(None);
            }
            let pairing = to_i64(&nu.pairing(&d))?;
            let kmax = (bound / pairing) as u64;
            let coeffs = (1..=kmax)
                .map(|k| {
                    let b = binomial(&c, k);
                    BigRational::from_integer(if k % 2 == 0 { b } else { -b })
                })
                .collect();
            Ok(Some(Factor {
                nu: *nu,
                pairing,
                coeffs,
                negative: c.is_negative(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc: BTreeMap<CodiffElem, (i64, BigRational)> = BTreeMap::new();
    acc.insert(CodiffElem::from_coords(p, 0, 0), (0, BigRational::one()));
    let mut region_restricted = false;
    for factor in factors.into_iter().flatten() {
        region_restricted |= factor.negative;
        let mut next = acc.clone();
        for (key, (pair, c)) in &acc {
            for (i, fc) in factor.coeffs.iter().enumerate() {
                let k = i as i64 + 1;
                let total = pair + k * factor.pairing;
                if total > bound {
                    break;
                }
                let idx = key.add(&factor.nu.times(k));
                let slot = next.entry(idx).or_insert((total, BigRational::zero()));
                slot.1 += c * fc;
            }
        }
        next.retain(|_, (_, c)| !c.is_zero());
        acc = next;
    }
    let zero = CodiffElem::from_coords(p, 0, 0);
    let constant = acc
        .remove(&zero)
        .map(|(_, c)| c)
        .unwrap_or_else(BigRational::zero);
    let terms = acc.into_iter().map(|(nu, (_, c))| (nu, c)).collect();
    let mut caveats = Vec::new();
    if region_restricted {
        caveats.push(REGION_RESTRICTED.to_string());
    }
    Ok(HilbertExpansion {
        p,
        rho: rho.rho,
        lattice_scale: w.fundamental_unit().trace(),
        grading_direction: d,
        grading_bound: bound,
        constant,
        terms,
        caveats,
    })
}

/// Outcome of [`integrality_normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    /// Least positive integer clearing all denominators on the window.
    pub c: BigInt,
    /// gcd of the cleared coefficients, reported but not divided out.
    pub gcd: BigInt,
    pub expansion: HilbertExpansion,
}

pub fn integrality_normalize(e: &HilbertExpansion) -> Normalization {
    let c = e
        .coefficients()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut expansion = e.scale(&BigRational::from_integer(c.clone()));
    if !c.is_one() {
        expansion.caveats.push(WINDOW_ONLY.to_string());
    }
    let gcd = expansion
        .coefficients()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_integer()));
    Normalization { c, gcd, expansion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borcherds::{standard_chamber, weyl_chamber_of};
    use crate::gamma0::{construct_f1_p5, construct_fm_p5};
    use crate::quadfield::fundamental_unit;

    #[test]
    fn default_direction_for_f1() {
        let f1 = construct_f1_p5(3).unwrap();
        let w = standard_chamber(&f1).unwrap();
        assert_eq!(
            default_grading_direction(&w).unwrap(),
            QFieldElem::from_fraction(5, 5, -1, 2)
        );
    }

    #[test]
    fn psi1_window_is_integral() {
        let f1 = construct_f1_p5(12).unwrap();
        let w = standard_chamber(&f1).unwrap();
        let e = product_expansion(&f1, &w, None, 6).unwrap();
        assert_eq!(e.constant, int(1));
        let eps0 = fundamental_unit(5).unwrap();
        assert_eq!(e.rho, eps0.mul(&QFieldElem::sqrt_p(5).inv().unwrap()));
        for nu in e.terms.keys() {
            assert_eq!(w.side(nu), Ordering::Greater);
            let pairing = e.pairing(nu);
            assert!(pairing > int(0) && pairing <= int(6));
        }
        let n = integrality_normalize(&e);
        assert_eq!(n.c, BigInt::one());
        assert_eq!(n.gcd, BigInt::one());
        assert!(e.caveats.is_empty() || e.caveats == vec![REGION_RESTRICTED.to_string()]);
    }

    #[test]
    fn insufficient_precision_is_reported() {
        let f1 = construct_f1_p5(3).unwrap();
        let w = standard_chamber(&f1).unwrap();
        assert!(matches!(
            product_expansion(&f1, &w, None, 10),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn zero_form_gives_one() {
        let z = construct_f1_p5(25).unwrap().scale(&int(0));
        let one = QFieldElem::one(5);
        let w = weyl_chamber_of(&z, &one, &one).unwrap();
        let e = product_expansion(&z, &w, None, 4).unwrap();
        assert!(e.terms.is_empty());
        assert_eq!(e.constant, int(1));
        let n = integrality_normalize(&e);
        assert_eq!((n.c, n.gcd), (BigInt::one(), BigInt::one()));
    }

    #[test]
    fn compact_case_has_no_prefactor() {
        let f6 = construct_fm_p5(6, 32).unwrap();
        let one = QFieldElem::one(5);
        let w = weyl_chamber_of(&f6, &one, &one).unwrap();
        let e = product_expansion(&f6, &w, None, 5).unwrap();
        assert!(e.rho.is_zero());
        assert_eq!(e.grading_direction, one);
        assert!(e.terms.keys().all(|nu| nu.value().is_totally_positive()));
    }

    #[test]
    fn scaled_expansion_needs_clearing() {
        let f1 = construct_f1_p5(12).unwrap();
        let w = standard_chamber(&f1).unwrap();
        let e = product_expansion(&f1, &w, None, 4)
            .unwrap()
            .scale(&rat(1, 3));
        let n = integrality_normalize(&e);
        assert_eq!(n.c, BigInt::from(3));
        assert!(n.expansion.caveats.contains(&WINDOW_ONLY.to_string()));
    }

    #[test]
    fn json_is_sorted() {
        let f1 = construct_f1_p5(12).unwrap();
        let w = standard_chamber(&f1).unwrap();
        let e = product_expansion(&f1, &w, None, 5).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["terms"].as_array().unwrap().len(), e.terms.len());
        assert_eq!(v["rho"]["u"], "1/2");
    }
}
