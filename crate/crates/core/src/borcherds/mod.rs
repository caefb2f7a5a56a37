//! Borcherds products on the Hilbert modular surface of `Q(sqrt p)`: Weyl
//! chambers, Weyl vectors, obstructions and the product expansion.

pub mod product;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::character::legendre_chi;
use crate::error::{Error, Result};
use crate::gamma0::{
    eisenstein_coefficient, s_multiplicity, Holomorphy, PrincipalPart, ScalarForm, Sign,
};
use crate::quadfield::{enumerate_norm_orbit_reps, fundamental_unit, CodiffElem, QFieldElem};
use crate::rational::{int, rat};

pub use product::{integrality_normalize, product_expansion, HilbertExpansion};

/// All `lambda eps0^(2k)` (and their negatives) for one orbit representative
/// `lambda > 0` of norm `n/p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WallFamily {
    pub n: i64,
    pub lambda: CodiffElem,
}

/// Negative exponents `n` with `a(n) != 0`, and their coefficients.
fn poles(f: &ScalarForm) -> Vec<(i64, BigRational)> {
    f.series()
        .numerator_terms()
        .iter()
        .filter(|(n, c)| **n < 0 && !c.is_zero())
        .map(|(n, c)| (*n, c.clone()))
        .collect()
}

fn require_weight_zero_plus(f: &ScalarForm) -> Result<()> {
    if f.weight() != 0 {
        return Err(Error::invalid("Borcherds lifts take weight 0 input"));
    }
    if f.sign() != Sign::Plus {
        return Err(Error::invalid(
            "Borcherds lifts take forms in the plus space",
        ));
    }
    Ok(())
}

/// The wall families `S(-n)` for the poles of `f`, one entry per
/// `eps0^2`-orbit; the walls themselves are `lambda y1 + lambda' y2 = 0` for
/// `lambda = +- eps0^(2k) lambda_0`.
pub fn walls_for(f: &ScalarForm) -> Result<Vec<WallFamily>> {
    let mut out = Vec::new();
    for (n, _) in poles(f) {
        let orbits = enumerate_norm_orbit_reps(f.p(), n)?;
        out.extend(
            orbits
                .reps
                .into_iter()
                .map(|lambda| WallFamily { n, lambda }),
        );
    }
    Ok(out)
}

/// A connected component of the complement of the walls, recorded by an
/// exact interior point `(y1, y2)` and the bracketing wall of every family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylChamber {
    p: i64,
    y1: QFieldElem,
    y2: QFieldElem,
    eps0: QFieldElem,
    /// For every family, the `lambda` in it with `lambda y1 + lambda' y2 < 0 <
    /// eps0^2 lambda y1 + eps0'^2 lambda' y2`.
    brackets: Vec<WallFamily>,
}

impl WeylChamber {
    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn interior_point(&self) -> (&QFieldElem, &QFieldElem) {
        (&self.y1, &self.y2)
    }

    /// Bracketing walls; empty for the whole space.
    pub fn walls(&self) -> &[WallFamily] {
        &self.brackets
    }

    pub fn is_whole_space(&self) -> bool {
        self.brackets.is_empty()
    }

    pub fn fundamental_unit(&self) -> &QFieldElem {
        &self.eps0
    }

    /// `R(W, n)`.
    pub fn r_set(&self, n: i64) -> Vec<CodiffElem> {
        self.brackets
            .iter()
            .filter(|w| w.n == n)
            .map(|w| w.lambda)
            .collect()
    }

    /// Pole orders whose walls cut out this chamber.
    pub fn pole_set(&self) -> Vec<i64> {
        let mut ns: Vec<i64> = self.brackets.iter().map(|w| w.n).collect();
        ns.dedup();
        ns
    }

    /// Whether `(y1, y2)` lies strictly inside.
    pub fn contains(&self, y1: &QFieldElem, y2: &QFieldElem) -> bool {
        if !y1.is_positive() || !y2.is_positive() {
            return false;
        }
        let eps2 = self.eps0.mul(&self.eps0);
        let eps2c = eps2.conj();
        self.brackets.iter().all(|w| {
            let lam = w.lambda.value();
            let below = lam.mul(y1).add(&lam.conj().mul(y2));
            let above = eps2.mul(&lam).mul(y1).add(&eps2c.mul(&lam.conj()).mul(y2));
            below.sign() == Ordering::Less && above.sign() == Ordering::Greater
        })
    }

    /// Sign of `nu y1 + nu' y2` at the interior point.
    pub fn side(&self, nu: &CodiffElem) -> Ordering {
        nu.pairing_at(&self.y1, &self.y2).sign()
    }
}

/// The chamber of `f` containing `(y1, y2)`, where both coordinates are real
/// numbers given as field elements under the first embedding.
pub fn weyl_chamber_of(f: &ScalarForm, y1: &QFieldElem, y2: &QFieldElem) -> Result<WeylChamber> {
    let p = f.p();
    if y1.p() != p || y2.p() != p {
        return Err(Error::invalid("base point lies in a different field"));
    }
    if !y1.is_positive() || !y2.is_positive() {
        return Err(Error::invalid("base point must have positive coordinates"));
    }
    let eps0 = fundamental_unit(p)?;
    let eps2 = eps0.mul(&eps0);
    let eps2_inv = eps2.inv()?;
    let mut brackets = Vec::new();
    for family in walls_for(f)? {
        let g = |lam: &QFieldElem| lam.mul(y1).add(&lam.conj().mul(y2)).sign();
        let mut lam = family.lambda.value();
        let mut steps = 0;
        // g(eps0^(2k) lambda) increases with k
        loop {
            steps += 1;
            if steps > 100_000 {
                return Err(Error::invalid("wall search did not terminate"));
            }
            match g(&lam) {
                Ordering::Equal => {
                    return Err(Error::OnWall(format!(
                        "base point lies on the wall of {lam} (n = {})",
                        family.n
                    )))
                }
                Ordering::Greater => lam = lam.mul(&eps2_inv),
                Ordering::Less => {
                    let next = lam.mul(&eps2);
                    match g(&next) {
                        Ordering::Equal => {
                            return Err(Error::OnWall(format!(
                                "base point lies on the wall of {next} (n = {})",
                                family.n
                            )))
                        }
                        Ordering::Greater => break,
                        Ordering::Less => lam = next,
                    }
                }
            }
        }
        brackets.push(WallFamily {
            n: family.n,
            lambda: CodiffElem::new(&lam)?,
        });
    }
    brackets.sort();
    Ok(WeylChamber {
        p,
        y1: y1.clone(),
        y2: y2.clone(),
        eps0,
        brackets,
    })
}

/// The chamber of `f` containing `(-eps0', eps0)`.
pub fn standard_chamber(f: &ScalarForm) -> Result<WeylChamber> {
    let eps0 = fundamental_unit(f.p())?;
    weyl_chamber_of(f, &eps0.conj().neg(), &eps0)
}

/// `R(W, n)` after checking that `W` belongs to `f`.
pub fn r_set(w: &WeylChamber, f: &ScalarForm, n: i64) -> Result<Vec<CodiffElem>> {
    check_chamber_matches(w, f)?;
    Ok(w.r_set(n))
}

fn check_chamber_matches(w: &WeylChamber, f: &ScalarForm) -> Result<()> {
    if w.p != f.p() {
        return Err(Error::invalid("chamber and form have different levels"));
    }
    let mut expected: Vec<i64> = Vec::new();
    for (n, _) in poles(f) {
        if !enumerate_norm_orbit_reps(f.p(), n)?.reps.is_empty() {
            expected.push(n);
        }
    }
    if expected != w.pole_set() {
        return Err(Error::invalid(
            "the chamber was built for a different principal part",
        ));
    }
    Ok(())
}

/// `rho_W`; its conjugate is `rho_W'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylVector {
    pub rho: QFieldElem,
}

impl WeylVector {
    pub fn rho_conj(&self) -> QFieldElem {
        self.rho.conj()
    }
}

/// `rho_W = (1/tr eps0) sum_{n<0} s(n) a(n) sum_{lambda in R(W,n)} eps0 lambda`.
pub fn weyl_vector(f: &ScalarForm, w: &WeylChamber) -> Result<WeylVector> {
    check_chamber_matches(w, f)?;
    let p = f.p();
    let eps0 = &w.eps0;
    let mut rho = QFieldElem::zero(p);
    for (n, a) in poles(f) {
        let weight = a * int(s_multiplicity(n, p));
        for lam in w.r_set(n) {
            rho = rho.add(&eps0.mul(&lam.value()).scale(&weight));
        }
    }
    let rho = rho.scale(&eps0.trace().recip());
    let scaled = rho.scale(&eps0.trace());
    if !scaled.is_zero() && CodiffElem::new(&scaled).is_err() {
        return Err(Error::invalid(format!(
            "(tr eps0) rho_W = {scaled} is not in the inverse different"
        )));
    }
    Ok(WeylVector { rho })
}

/// Result of the obstruction test against a cusp form basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub ok: bool,
    /// Constant term forced by the Eisenstein series.
    pub a0: BigRational,
    /// `sum s(n) a(n) b(-n)` for each basis form.
    pub pairings: Vec<BigRational>,
}

/// Tests whether `pp` is the principal part of a form in `A_k^eps`, pairing it
/// with a basis of `S_kappa^delta`, `kappa = 2 - k`, `delta = chi_p(-1) eps`.
pub fn obstruction_check(
    pp: &PrincipalPart,
    cusp_basis: &[ScalarForm],
) -> Result<ObstructionReport> {
    let p = pp.p();
    let kappa = 2 - pp.weight();
    if kappa < 2 {
        return Err(Error::Unsupported(format!(
            "obstruction spaces of weight {kappa} are not handled"
        )));
    }
    let delta = legendre_chi(-1, p) * pp.sign();
    let depth = pp.depth();
    for (i, b) in cusp_basis.iter().enumerate() {
        if b.p() != p || b.weight() != kappa {
            return Err(Error::invalid(format!(
                "basis form {i} must have level {p} and weight {kappa}"
            )));
        }
        if b.sign() != Sign::from_i32(delta) {
            return Err(Error::invalid(format!(
                "basis form {i} must have sign {delta}"
            )));
        }
        if b.series()
            .min_exponent()
            .is_some_and(|e| e <= num_rational::Ratio::from_integer(0))
        {
            return Err(Error::invalid(format!("basis form {i} is not a cusp form")));
        }
        if b.holomorphy() == Holomorphy::NearlyHolomorphic {
            return Err(Error::invalid(format!("basis form {i} is not holomorphic")));
        }
        if b.truncation() <= depth {
            return Err(Error::InsufficientPrecision {
                needed: (depth + 1).to_string(),
                available: b.truncation().to_string(),
            });
        }
    }
    let mut a0 = BigRational::zero();
    let mut pairings = vec![BigRational::zero(); cusp_basis.len()];
    for (n, a) in pp.terms() {
        let sa = a * int(s_multiplicity(*n, p));
        let big_b = eisenstein_coefficient(kappa as u32, delta, p, -n)?;
        a0 -= &sa * big_b * rat(1, 2);
        for (slot, b) in pairings.iter_mut().zip(cusp_basis) {
            *slot += &sa * b.coeff(-n).unwrap_or_else(BigRational::zero);
        }
    }
    let ok = pairings.iter().all(|x| x.is_zero());
    Ok(ObstructionReport { ok, a0, pairings })
}

/// Weight and divisor of the lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftMetadata {
    pub weight: BigRational,
    /// `(m, multiplicity)` for the components `T(m)`.
    pub divisor: Vec<(i64, BigRational)>,
}

/// Weight `a(0)` and divisor `sum s(n) a(n) T(-n)`.
pub fn lift_metadata(f: &ScalarForm) -> Result<LiftMetadata> {
    require_weight_zero_plus(f)?;
    let weight = f.coeff(0).ok_or_else(|| Error::InsufficientPrecision {
        needed: "1".into(),
        available: f.truncation().to_string(),
    })?;
    let divisor = poles(f)
        .into_iter()
        .rev()
        .map(|(n, a)| (-n, a * int(s_multiplicity(n, f.p()))))
        .collect();
    Ok(LiftMetadata { weight, divisor })
}

/// Checks `s(n) a(n) in Z` for `n < 0`.
pub(crate) fn require_integral_divisor(f: &ScalarForm) -> Result<()> {
    for (n, a) in poles(f) {
        let c = a * int(s_multiplicity(n, f.p()));
        if !c.is_integer() {
            return Err(Error::invalid(format!(
                "s({n}) a({n}) = {c} is not an integer"
            )));
        }
    }
    Ok(())
}

pub(crate) fn exponent_at(f: &ScalarForm, m: i64) -> Option<BigInt> {
    let c = f.coeff(m)? * int(s_multiplicity(m, f.p()));
    c.is_integer().then(|| c.to_integer())
}
