//! Exact arithmetic in `K = Q(sqrt p)` for primes `p = 1 mod 4`, its ring of
//! integers, and the inverse different.
//!
//! Positivity always refers to the embedding sending `sqrt p` to the positive
//! real root; the other embedding is reached through [`QFieldElem::conj`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::character::require_odd_prime;
use crate::error::{Error, Result};
use crate::rational::{self, int, rat};

/// `u + v sqrt(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QFieldElem {
    p: i64,
    pub u: BigRational,
    pub v: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// `sqrt p -> +sqrt p`
    First,
    /// `sqrt p -> -sqrt p`
    Second,
}

impl QFieldElem {
    pub fn new(p: i64, u: BigRational, v: BigRational) -> Self {
        QFieldElem { p, u, v }
    }

    pub fn from_rational(p: i64, u: BigRational) -> Self {
        Self::new(p, u, BigRational::zero())
    }

    pub fn from_ints(p: i64, u: i64, v: i64) -> Self {
        Self::new(p, int(u), int(v))
    }

    /// `(a + b sqrt p) / d`.
    pub fn from_fraction(p: i64, a: i64, b: i64, d: i64) -> Self {
        Self::new(p, rat(a, d), rat(b, d))
    }

    pub fn zero(p: i64) -> Self {
        Self::from_ints(p, 0, 0)
    }

    pub fn one(p: i64) -> Self {
        Self::from_ints(p, 1, 0)
    }

    pub fn sqrt_p(p: i64) -> Self {
        Self::from_ints(p, 0, 1)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "elements of different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, &self.u + &other.u, &self.v + &other.v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, &self.u - &other.u, &self.v - &other.v)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, -&self.u, -&self.v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let p = int(self.p);
        Self::new(
            self.p,
            &self.u * &other.u + &self.v * &other.v * p,
            &self.u * &other.v + &self.v * &other.u,
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.p, &self.u * c, &self.v * c)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.p, self.u.clone(), -&self.v)
    }

    /// `N(x) = x x' = u^2 - p v^2`.
    pub fn norm(&self) -> BigRational {
        &self.u * &self.u - &self.v * &self.v * int(self.p)
    }

    /// `tr(x) = x + x' = 2u`.
    pub fn trace(&self) -> BigRational {
        &self.u * int(2)
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::invalid("division by zero in Q(sqrt p)"));
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.p);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Sign of `u + v sqrt p` under the given embedding, decided exactly.
    pub fn sign_at(&self, which: Embedding) -> Ordering {
        let v = match which {
            Embedding::First => self.v.clone(),
            Embedding::Second => -&self.v,
        };
        let u = &self.u;
        let su = u.cmp(&BigRational::zero());
        let sv = v.cmp(&BigRational::zero());
        match (su, sv) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (a, b) if a == b => a,
            _ => {
                // opposite signs: compare u^2 with p v^2
                let lhs = u * u;
                let rhs = &v * &v * int(self.p);
                match lhs.cmp(&rhs) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => su,
                    Ordering::Less => sv,
                }
            }
        }
    }

    pub fn sign(&self) -> Ordering {
        self.sign_at(Embedding::First)
    }

    /// Compares the images of `self` and `other` under one embedding.
    pub fn compare_at_embedding(&self, other: &Self, which: Embedding) -> Ordering {
        self.sub(other).sign_at(which)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_at(Embedding::First) == Ordering::Greater
            && self.sign_at(Embedding::Second) == Ordering::Greater
    }

    pub fn to_f64(&self, which: Embedding) -> f64 {
        let u = self.u.to_f64().unwrap_or(f64::NAN);
        let v = self.v.to_f64().unwrap_or(f64::NAN);
        let r = (self.p as f64).sqrt();
        match which {
            Embedding::First => u + v * r,
            Embedding::Second => u - v * r,
        }
    }

    /// Membership in `O = Z[(1 + sqrt p)/2]`: `2u, 2v` integers of equal parity.
    pub fn is_integral(&self) -> bool {
        let a = &self.u * int(2);
        let b = &self.v * int(2);
        if !a.is_integer() || !b.is_integer() {
            return false;
        }
        let d = a.to_integer() - b.to_integer();
        (d % BigInt::from(2)).is_zero()
    }

    pub fn repr(&self) -> QFieldRepr {
        QFieldRepr {
            u: rational::to_text(&self.u),
            v: rational::to_text(&self.v),
        }
    }

    pub fn from_repr(p: i64, repr: &QFieldRepr) -> Result<Self> {
        Ok(Self::new(
            p,
            rational::parse(&repr.u)?,
            rational::parse(&repr.v)?,
        ))
    }
}

impl fmt::Display for QFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.u.is_zero(), self.v.is_zero()) {
            (_, true) => write!(f, "{}", rational::to_text(&self.u)),
            (true, false) => write!(f, "{}*sqrt({})", rational::to_text(&self.v), self.p),
            (false, false) => {
                let sign = if self.v.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{} {} {}*sqrt({})",
                    rational::to_text(&self.u),
                    sign,
                    rational::to_text(&self.v.abs()),
                    self.p
                )
            }
        }
    }
}

/// Wire form `{"u": "p/q", "v": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFieldRepr {
    pub u: String,
    pub v: String,
}

/// An element of the inverse different `d^-1 = (1/sqrt p) O`, stored as
/// integer coordinates: `nu = (s + t w) / sqrt p` with `w = (1 + sqrt p)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodiffElem {
    p: i64,
    s: i64,
    t: i64,
}

impl CodiffElem {
    pub fn from_coords(p: i64, s: i64, t: i64) -> Self {
        CodiffElem { p, s, t }
    }

    /// Fails unless `lambda sqrt p` lies in `O`.
    pub fn new(lambda: &QFieldElem) -> Result<Self> {
        let p = lambda.p();
        let mu = lambda.mul(&QFieldElem::sqrt_p(p));
        if !mu.is_integral() {
            return Err(Error::invalid(format!(
                "{lambda} is not in the inverse different"
            )));
        }
        let a = (&mu.u * int(2)).to_integer();
        let b = (&mu.v * int(2)).to_integer();
        let to_i64 = |x: BigInt| {
            x.to_i64()
                .ok_or_else(|| Error::invalid("codifferent coordinates out of range"))
        };
        let (a, b) = (to_i64(a)?, to_i64(b)?);
        Ok(CodiffElem {
            p,
            s: (a - b) / 2,
            t: b,
        })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn coords(&self) -> (i64, i64) {
        (self.s, self.t)
    }

    /// `nu = t/2 + ((2s + t)/(2p)) sqrt p`.
    pub fn value(&self) -> QFieldElem {
        QFieldElem::new(self.p, rat(self.t, 2), rat(2 * self.s + self.t, 2 * self.p))
    }

    /// `tr(nu) = t`, always an integer.
    pub fn trace(&self) -> i64 {
        self.t
    }

    /// `N(nu) = (p t^2 - (2s + t)^2) / (4p)`.
    pub fn norm(&self) -> BigRational {
        let a = BigInt::from(2 * self.s + self.t);
        let b = BigInt::from(self.t);
        BigRational::new(
            BigInt::from(self.p) * &b * &b - &a * &a,
            BigInt::from(4 * self.p),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        CodiffElem {
            p: self.p,
            s: self.s + other.s,
            t: self.t + other.t,
        }
    }

    pub fn times(&self, k: i64) -> Self {
        CodiffElem {
            p: self.p,
            s: self.s * k,
            t: self.t * k,
        }
    }

    pub fn neg(&self) -> Self {
        self.times(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.s == 0 && self.t == 0
    }

    /// `nu y1 + nu' y2` for a point given by two real field elements.
    pub fn pairing_at(&self, y1: &QFieldElem, y2: &QFieldElem) -> QFieldElem {
        let nu = self.value();
        nu.mul(y1).add(&nu.conj().mul(y2))
    }

    /// `tr(nu d)`, the pairing with the point `(d, d')`.
    pub fn pairing(&self, direction: &QFieldElem) -> BigRational {
        self.value().mul(direction).trace()
    }
}

impl fmt::Display for CodiffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

pub(crate) fn require_one_mod_four(p: i64) -> Result<()> {
    require_odd_prime(p)?;
    if p % 4 != 1 {
        return Err(Error::invalid(format!("p = {p} must be 1 mod 4")));
    }
    Ok(())
}

fn isqrt(n: i128) -> i128 {
    if n < 0 {
        panic!("isqrt of negative number");
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The fundamental unit `eps0 > 1` of `O`, read off the continued fraction
/// of `w = (1 + sqrt p)/2`.
///
/// For each convergent `h/k` of `w` the element `(h - k) + k w` is a unit
/// exactly when `N(h - k w) = h^2 - hk - ((p-1)/4) k^2 = +-1`; the first hit is
/// the smallest unit above one.
pub fn fundamental_unit(p: i64) -> Result<QFieldElem> {
    require_one_mod_four(p)?;
    let d = p as i128;
    let c = (d - 1) / 4;
    let root = isqrt(d);
    // w = (P + sqrt D) / Q
    let (mut pp, mut qq) = (1i128, 2i128);
    // convergent seeds h_{-2}/k_{-2} = 0/1, h_{-1}/k_{-1} = 1/0
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    for _ in 0..10_000 {
        let a = (pp + root).div_euclid(qq);
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        let n = h * h - h * k - c * k * k;
        if n == 1 || n == -1 {
            if n != -1 {
                return Err(Error::invalid(format!(
                    "fundamental unit of Q(sqrt {p}) has norm +1, expected -1"
                )));
            }
            // (h - k) + k (1 + sqrt p)/2
            let unit = QFieldElem::new(p, rat(2 * (h - k) as i64 + k as i64, 2), rat(k as i64, 2));
            return Ok(unit);
        }
        pp = a * qq - pp;
        qq = (d - pp * pp) / qq;
    }
    Err(Error::invalid("continued fraction did not produce a unit"))
}

/// One representative per `eps0^2`-orbit of `{lambda in d^-1 : lambda > 0, N(lambda) = n/p}`.
#[derive(Clone, Debug)]
pub struct NormOrbits {
    pub n: i64,
    pub reps: Vec<CodiffElem>,
    /// Largest `b` scanned in `mu = (a + b sqrt p)/2`.
    pub search_bound: i64,
}

/// Totally positive `mu = (a + b sqrt p)/2 in O` with `N(mu) = m`, one per
/// `eps0^2`-orbit (those with `1 <= mu/mu' < eps0^4`), plus the scan bound.
fn totally_positive_norm_reps(p: i64, m: i64) -> Result<(Vec<(i64, i64)>, i64)> {
    assert!(m > 0);
    let eps = fundamental_unit(p)?;
    let eps2 = eps.mul(&eps);
    let eps4 = eps2.mul(&eps2);
    // b sqrt p = mu - mu' < sqrt(m) eps0^2
    let bound =
        ((m as f64).sqrt() * eps2.to_f64(Embedding::First) / (p as f64).sqrt()).ceil() as i64 + 1;
    let mut reps = Vec::new();
    for b in 0..=bound {
        let a2 = 4 * m as i128 + (p as i128) * (b as i128) * (b as i128);
        let a = isqrt(a2);
        if a * a != a2 || (a - b as i128) % 2 != 0 {
            continue;
        }
        let mu = QFieldElem::from_fraction(p, a as i64, b, 2);
        // mu / mu' < eps0^4  <=>  eps0^4 mu' - mu > 0 (mu' > 0)
        if eps4.mul(&mu.conj()).sub(&mu).is_positive() {
            reps.push((a as i64, b));
        }
    }
    Ok((reps, bound))
}

/// Orbit representatives of `lambda in d^-1` with `lambda > 0` and `N(lambda) = n/p`.
pub fn enumerate_norm_orbit_reps(p: i64, n: i64) -> Result<NormOrbits> {
    if n >= 0 {
        return Err(Error::invalid("n must be negative"));
    }
    let (pairs, search_bound) = totally_positive_norm_reps(p, -n)?;
    let sqrt_p = QFieldElem::sqrt_p(p);
    let reps = pairs
        .into_iter()
        .map(|(a, b)| {
            let mu = QFieldElem::from_fraction(p, a, b, 2);
            CodiffElem::new(&mu.div(&sqrt_p).expect("sqrt p is invertible"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormOrbits {
        n,
        reps,
        search_bound,
    })
}

/// Whether `m` is the norm of an ideal of `O`. Restricted to the class
/// number one fields `p in {5, 13, 17}`, where ideal norms are element norms.
pub fn is_ideal_norm(m: i64, p: i64) -> Result<bool> {
    if ![5, 13, 17].contains(&p) {
        return Err(Error::Unsupported(format!(
            "ideal norms are only decided for p in {{5, 13, 17}}, got {p}"
        )));
    }
    if m <= 0 {
        return Err(Error::invalid("m must be positive"));
    }
    let (reps, _) = totally_positive_norm_reps(p, m)?;
    Ok(!reps.is_empty())
}

/// All `nu in d^-1` with `0 < tr(nu d) <= bound` and `N(nu) >= norm_floor`,
/// sorted by `(pairing, coordinates)`.
///
/// The norm floor makes the set finite: with `x = nu d`, `y = nu' d'` one has
/// `x + y in (0, bound]` and `xy >= norm_floor N(d)`.
pub fn codiff_enumerate_pairing_bounded(
    p: i64,
    direction: &QFieldElem,
    bound: &BigRational,
    norm_floor: &BigRational,
) -> Result<Vec<CodiffElem>> {
    require_one_mod_four(p)?;
    if !direction.is_totally_positive() {
        return Err(Error::invalid(format!(
            "direction {direction} is not totally positive"
        )));
    }
    if !bound.is_positive() {
        return Ok(Vec::new());
    }
    let b = bound.to_f64().unwrap();
    let c = (-norm_floor.to_f64().unwrap()).max(0.0);
    let nd = direction.norm().to_f64().unwrap();
    let r = (b * b + 4.0 * c * nd).sqrt();
    let (d1, d2) = (
        direction.to_f64(Embedding::First),
        direction.to_f64(Embedding::Second),
    );
    let (x_lo, x_hi) = (-r / 2.0, (b + r) / 2.0);
    let (nu_lo, nu_hi) = (x_lo / d1, x_hi / d1);
    let (nc_lo, nc_hi) = (x_lo / d2, x_hi / d2);
    let sp = (p as f64).sqrt();
    // t = nu + nu', a = sqrt(p) (nu - nu')
    let t_lo = (nu_lo + nc_lo).floor() as i64 - 1;
    let t_hi = (nu_hi + nc_hi).ceil() as i64 + 1;
    let a_lo = (sp * (nu_lo - nc_hi)).floor() as i64 - 1;
    let a_hi = (sp * (nu_hi - nc_lo)).ceil() as i64 + 1;
    let mut out = Vec::new();
    for t in t_lo..=t_hi {
        for a in a_lo..=a_hi {
            if (a - t).rem_euclid(2) != 0 {
                continue;
            }
            let nu = CodiffElem::from_coords(p, (a - t) / 2, t);
            let pairing = nu.pairing(direction);
            if pairing.is_positive() && &pairing <= bound && &nu.norm() >= norm_floor {
                out.push((pairing, nu));
            }
        }
    }
    out.sort();
    Ok(out.into_iter().map(|(_, nu)| nu).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> QFieldElem {
        QFieldElem::from_fraction(5, 1, 1, 2)
    }

    #[test]
    fn golden_ratio_norm_and_trace() {
        let x = golden();
        assert_eq!(x.norm(), int(-1));
        assert_eq!(x.trace(), int(1));
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn exact_signs() {
        let x = QFieldElem::from_ints(5, 2, -1); // 2 - sqrt5 < 0
        assert_eq!(x.sign(), Ordering::Less);
        assert_eq!(x.sign_at(Embedding::Second), Ordering::Greater);
        let y = QFieldElem::from_ints(5, -3, 1); // sqrt5 - 3 < 0
        assert_eq!(y.sign(), Ordering::Less);
        assert_eq!(QFieldElem::zero(5).sign(), Ordering::Equal);
        let z = QFieldElem::from_fraction(5, 5, -1, 2);
        assert!(z.is_totally_positive());
    }

    #[test]
    fn fundamental_units() {
        assert_eq!(fundamental_unit(5).unwrap(), golden());
        assert_eq!(
            fundamental_unit(13).unwrap(),
            QFieldElem::from_fraction(13, 3, 1, 2)
        );
        let e17 = fundamental_unit(17).unwrap();
        assert_eq!(e17.norm(), int(-1));
        assert_eq!(e17, QFieldElem::from_ints(17, 4, 1));
        assert_eq!(
            fundamental_unit(29).unwrap(),
            QFieldElem::from_fraction(29, 5, 1, 2)
        );
        assert!(fundamental_unit(7).is_err());
    }

    #[test]
    fn codifferent_coordinates() {
        let lam = QFieldElem::sqrt_p(5).inv().unwrap();
        let c = CodiffElem::new(&lam).unwrap();
        assert_eq!(c.value(), lam);
        assert_eq!(c.norm(), rat(-1, 5));
        assert_eq!(c.trace(), 0);
        assert!(CodiffElem::new(&QFieldElem::from_fraction(5, 1, 0, 3)).is_err());
        let half = QFieldElem::from_fraction(5, 1, 0, 2);
        assert!(CodiffElem::new(&half).is_err());
    }

    #[test]
    fn norm_minus_one_orbit_for_p5() {
        let orbits = enumerate_norm_orbit_reps(5, -1).unwrap();
        assert_eq!(orbits.reps.len(), 1);
        let lam = orbits.reps[0].value();
        assert_eq!(lam, QFieldElem::sqrt_p(5).inv().unwrap());
        assert!(enumerate_norm_orbit_reps(5, -2).unwrap().reps.is_empty());
        let four = enumerate_norm_orbit_reps(5, -4).unwrap();
        assert_eq!(four.reps.len(), 1);
        assert_eq!(
            four.reps[0].value(),
            QFieldElem::from_rational(5, int(2))
                .div(&QFieldElem::sqrt_p(5))
                .unwrap()
        );
    }

    #[test]
    fn ideal_norms() {
        assert!(is_ideal_norm(4, 5).unwrap());
        assert!(!is_ideal_norm(6, 5).unwrap());
        assert!(is_ideal_norm(5, 5).unwrap());
        assert!(is_ideal_norm(1, 13).unwrap());
        assert!(is_ideal_norm(4, 17).unwrap());
        assert!(is_ideal_norm(3, 29).is_err());
    }

    #[test]
    fn pairing_bounded_enumeration() {
        let one = QFieldElem::one(5);
        assert!(codiff_enumerate_pairing_bounded(5, &one, &int(0), &int(0))
            .unwrap()
            .is_empty());
        let all = codiff_enumerate_pairing_bounded(5, &one, &int(1), &rat(-1, 5)).unwrap();
        // tr(nu) = 1 and N(nu) >= -1/5: (5 - a^2)/20 >= -1/5  <=>  a^2 <= 9, a odd
        assert_eq!(all.len(), 4);
        for nu in &all {
            assert_eq!(nu.trace(), 1);
            assert!(nu.value().mul(&QFieldElem::sqrt_p(5)).is_integral());
        }
    }
}
