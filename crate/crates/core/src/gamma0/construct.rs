//! Construction of the weight 0 forms `f_m in A_0^+(p, chi_p)` with principal
//! part `s(m)^-1 q^-m`.
//!
//! For `p = 5` the seeds are `f_1 = E2 / H_2`, `f_4` as a polynomial in `f_1`
//! and `G_2/H_2`, and `f_5` from `E_2^+(tau) J(5 tau)`. Every other `f_m` comes
//! from multiplying seeds by powers of `j(p tau)` and eliminating principal
//! parts from the deepest pole upwards.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::eisenstein::{eisenstein_e2_level5, eisenstein_e_delta, eisenstein_g, eisenstein_h};
use super::{dim_s2_plus, Holomorphy, PrincipalPart, ScalarForm, Sign};
use crate::borcherds::obstruction_check;
use crate::character::legendre_chi;
use crate::error::{Error, Result};
use crate::rational::{int, rat};
use crate::series::classical::{klein_j, weight_minus2_j};
use crate::series::{Exponent, FracQSeries};

/// Default precision: 25 coefficients past the constant term.
pub const DEFAULT_EXTRA_PRECISION: i64 = 25;

fn ex(n: i64) -> Exponent {
    Exponent::from_integer(n)
}

fn plus_form(series: FracQSeries) -> Result<ScalarForm> {
    ScalarForm::new(5, 0, Sign::Plus, Holomorphy::NearlyHolomorphic, series)
}

/// Runs `build` at increasing working precision until the result is known
/// below `q^prec`, then truncates to exactly that order.
fn at_precision<F>(prec: i64, mut extra: i64, build: F) -> Result<ScalarForm>
where
    F: Fn(i64) -> Result<ScalarForm>,
{
    for _ in 0..6 {
        let f = build(prec + extra)?;
        if f.series().truncation() >= ex(prec) {
            return Ok(f.truncate(prec));
        }
        extra = 2 * extra + 5;
    }
    Err(Error::InsufficientPrecision {
        needed: prec.to_string(),
        available: "working precision limit".into(),
    })
}

fn f1_raw(work: i64) -> Result<FracQSeries> {
    let e2 = eisenstein_e2_level5(work);
    let h2 = eisenstein_h(2, 5, work)?;
    Ok(e2.mul(&h2.series().invert(ex(work))?))
}

fn f4_raw(work: i64) -> Result<FracQSeries> {
    let g2 = eisenstein_g(2, 5, work)?;
    let h2 = eisenstein_h(2, 5, work)?;
    let ratio = g2.series().mul(&h2.series().invert(ex(work))?);
    let f1 = f1_raw(work)?;
    let f1_cubed = f1.mul(&f1).mul(&f1);
    let inner = f1_cubed.add(&f1.scale(&int(108)));
    Ok(ratio
        .mul(&inner)
        .sub(&f1_cubed.scale(&int(9)))
        .add(&f1.scale(&int(1128))))
}

fn f5_raw(work: i64) -> Result<FracQSeries> {
    let e_plus = eisenstein_e_delta(2, 1, 5, work)?;
    // J(5 tau) below q^(work + 5)
    let j5 = weight_minus2_j(ex(work / 5 + 3)).rescale(5);
    let product = e_plus.series().mul(&j5).scale(&rat(1, 2));
    let product = ScalarForm::new(5, 0, Sign::Plus, Holomorphy::NearlyHolomorphic, product)?;
    let generators = [
        plus_form(f1_raw(work)?)?,
        plus_form(f4_raw(work)?)?,
        product,
    ];
    let target = PrincipalPart::new(5, 1, 0, [(-5, rat(1, 2))])?;
    reduce_inner(&generators, &target)
}

/// `f_1 = E2 / H_2` for `p = 5`.
pub fn construct_f1_p5(prec: i64) -> Result<ScalarForm> {
    at_precision(prec, 4, |w| plus_form(f1_raw(w)?))
}

/// `f_4 = G_2/H_2 (f_1^3 + 108 f_1) - 9 f_1^3 + 1128 f_1` for `p = 5`.
pub fn construct_f4_p5(prec: i64) -> Result<ScalarForm> {
    at_precision(prec, 8, |w| plus_form(f4_raw(w)?))
}

/// `f_5` for `p = 5`: the product `(1/2) E_2^+(tau) J(5 tau)` with its
/// `q^-4` and `q^-1` terms removed by `f_4` and `f_1`.
pub fn construct_f5_p5(prec: i64) -> Result<ScalarForm> {
    at_precision(prec, 10, |w| plus_form(f5_raw(w)?))
}

/// Leading pole order and coefficient of a generator.
fn pole(g: &ScalarForm) -> Option<(i64, BigRational)> {
    let (e, c) = g.series().leading()?;
    (e < Exponent::zero()).then(|| (-e.to_integer(), c.clone()))
}

/// Elimination without the final precision check.
fn reduce_inner(generators: &[ScalarForm], target: &PrincipalPart) -> Result<FracQSeries> {
    let p = target.p();
    let mut seeds: Vec<(i64, BigRational, &ScalarForm)> = Vec::new();
    for g in generators {
        if g.p() != p || g.weight() != target.weight() {
            return Err(Error::invalid(
                "generator level or weight does not match the target",
            ));
        }
        if g.sign() != Sign::from_i32(target.sign()) {
            return Err(Error::invalid("generator sign does not match the target"));
        }
        if let Some((m, c)) = pole(g) {
            seeds.push((m, c, g));
        }
    }
    let floor = generators
        .iter()
        .map(|g| g.series().truncation())
        .min()
        .unwrap_or_else(|| ex(1));
    if target.is_empty() {
        return Ok(FracQSeries::zero(1, floor));
    }
    let depth = target.depth();
    let max_seed_trunc = generators
        .iter()
        .map(|g| g.series().truncation())
        .max()
        .unwrap_or(ex(0));
    let j_trunc = (max_seed_trunc / p).ceil() + 2;
    let jp = klein_j(j_trunc).rescale(p);
    let mut j_powers: Vec<FracQSeries> = vec![FracQSeries::one(jp.truncation() + p)];
    let mut basis: BTreeMap<i64, (BigRational, FracQSeries)> = BTreeMap::new();
    let mut acc: Option<FracQSeries> = None;
    for n in (1..=depth).rev() {
        let have = acc
            .as_ref()
            .and_then(|a| a.coeff_at(-n))
            .unwrap_or_else(BigRational::zero);
        let diff = target.coeff(-n) - have;
        if diff.is_zero() {
            continue;
        }
        if let std::collections::btree_map::Entry::Vacant(e) = basis.entry(n) {
            let (m, c, g) = seeds
                .iter()
                .filter(|(m, _, _)| *m <= n && (n - m) % p == 0)
                .max_by_key(|(m, _, _)| *m)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "no generator reaches pole order {n} through powers of j({p} tau)"
                    ))
                })?;
            let k = ((n - m) / p) as usize;
            while j_powers.len() <= k {
                let next = j_powers.last().unwrap().mul(&jp);
                j_powers.push(next);
            }
            e.insert((c.clone(), g.series().mul(&j_powers[k])));
        }
        let (lead, b) = &basis[&n];
        let step = b.scale(&(diff / lead));
        acc = Some(match acc {
            None => step,
            Some(a) => a.add(&step),
        });
    }
    Ok(acc.unwrap_or_else(|| FracQSeries::zero(1, floor)))
}

fn check_obstructions(target: &PrincipalPart, cusp_basis: Option<&[ScalarForm]>) -> Result<()> {
    let p = target.p();
    if target.weight() != 0 || p % 4 != 1 {
        return Ok(());
    }
    if dim_s2_plus(p)? == 0 {
        return Ok(());
    }
    match cusp_basis {
        None => Err(Error::invalid(format!(
            "S_2^+({p}, chi_{p}) is nonzero; a cusp form basis is required to check obstructions"
        ))),
        Some(basis) => {
            let report = obstruction_check(target, basis)?;
            if report.ok {
                Ok(())
            } else {
                Err(Error::invalid(
                    "the principal part is obstructed by a cusp form",
                ))
            }
        }
    }
}

/// The form in `A_k^eps` whose principal part is exactly `target`, built from
/// `generators` times powers of `j(p tau)` by elimination in decreasing pole
/// order. Fails when the result is not known below `q^prec`.
pub fn reduce_to_principal_part(
    generators: &[ScalarForm],
    target: &PrincipalPart,
    prec: i64,
    cusp_basis: Option<&[ScalarForm]>,
) -> Result<ScalarForm> {
    check_obstructions(target, cusp_basis)?;
    let series = reduce_inner(generators, target)?;
    if series.truncation() < ex(prec) {
        return Err(Error::InsufficientPrecision {
            needed: prec.to_string(),
            available: crate::rational::small_to_text(&series.truncation()),
        });
    }
    ScalarForm::new(
        target.p(),
        target.weight(),
        Sign::from_i32(target.sign()),
        Holomorphy::NearlyHolomorphic,
        series.truncate(ex(prec)),
    )
}

/// `f_m` for `p = 5`, known below `q^prec`.
pub fn construct_fm_p5(m: i64, prec: i64) -> Result<ScalarForm> {
    let target = PrincipalPart::for_fm(5, m)?;
    match m {
        1 => construct_f1_p5(prec),
        4 => construct_f4_p5(prec),
        5 => construct_f5_p5(prec),
        _ => at_precision(prec, m + 12, |w| {
            let seeds = [
                plus_form(f1_raw(w)?)?,
                plus_form(f4_raw(w)?)?,
                plus_form(f5_raw(w)?)?,
            ];
            plus_form(reduce_inner(&seeds, &target)?)
        }),
    }
}

/// `f_m` for any level: built-in seeds for `p = 5`, user-supplied seeds otherwise.
pub fn construct_fm(
    p: i64,
    m: i64,
    prec: i64,
    seeds: Option<&[ScalarForm]>,
    cusp_basis: Option<&[ScalarForm]>,
) -> Result<ScalarForm> {
    if m <= 0 {
        return Err(Error::invalid("m must be positive"));
    }
    if legendre_chi(m, p) == -1 {
        return Err(Error::CharacterVanishes { m, p });
    }
    match (p, seeds) {
        (5, None) => construct_fm_p5(m, prec),
        (_, Some(seeds)) => {
            let target = PrincipalPart::for_fm(p, m)?;
            reduce_to_principal_part(seeds, &target, prec, cusp_basis)
        }
        (_, None) => Err(Error::Unsupported(format!(
            "no built-in seed forms for p = {p}; supply them with a seed file"
        ))),
    }
}
