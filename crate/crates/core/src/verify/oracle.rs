//! Brute-force reference computations, kept apart from the main code paths:
//! own enumeration, own sign test, own power series and own multiplication.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gamma0::ScalarForm;
use crate::quadfield::{CodiffElem, QFieldElem};

/// `u + v sqrt p` as a bare pair.
type Pair = (BigRational, BigRational);

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pair_mul(p: i64, x: &Pair, y: &Pair) -> Pair {
    (&x.0 * &y.0 + &x.1 * &y.1 * q(p), &x.0 * &y.1 + &x.1 * &y.0)
}

fn pair_add(x: &Pair, y: &Pair) -> Pair {
    (&x.0 + &y.0, &x.1 + &y.1)
}

/// Sign of `u + v sqrt p`, from `u^2` against `p v^2`.
fn pair_sign(p: i64, x: &Pair) -> i32 {
    let su = sgn(&x.0);
    let sv = sgn(&x.1);
    if su == sv {
        return su;
    }
    if su == 0 {
        return sv;
    }
    if sv == 0 {
        return su;
    }
    let lhs = &x.0 * &x.0;
    let rhs = &x.1 * &x.1 * q(p);
    if lhs > rhs {
        su
    } else if lhs < rhs {
        sv
    } else {
        0
    }
}

fn sgn(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// `nu = (a + b sqrt p) / (2 sqrt p) = b/2 + (a / 2p) sqrt p`, `a = b mod 2`.
fn nu_pair(p: i64, a: i64, b: i64) -> Pair {
    (
        BigRational::new(b.into(), 2.into()),
        BigRational::new(a.into(), (2 * p).into()),
    )
}

fn conj(x: &Pair) -> Pair {
    (x.0.clone(), -x.1.clone())
}

fn elem(x: &QFieldElem) -> Pair {
    (x.u.clone(), x.v.clone())
}

/// Output of the reference product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleExpansion {
    pub constant: BigRational,
    pub terms: BTreeMap<CodiffElem, BigRational>,
}

/// Product over `nu` with `nu y1 + nu' y2 > 0` and `0 < tr(nu d) <= bound` of
/// `(1 - X^nu)^(s(p nu nu') a(p nu nu'))`, multiplied out term by term.
///
/// Returns `None` when a needed coefficient of `f` is unknown or an exponent
/// is not an integer.
pub fn brute_force_product(
    f: &ScalarForm,
    y1: &QFieldElem,
    y2: &QFieldElem,
    d: &QFieldElem,
    bound: i64,
) -> Option<OracleExpansion> {
    let p = f.p();
    let (y1, y2, d) = (elem(y1), elem(y2), elem(d));
    // d = (d1 + d2 sqrt p)/2
    let d1 = (&d.0 * q(2)).to_integer();
    let d2 = (&d.1 * q(2)).to_integer();
    let deepest = f
        .series()
        .numerator_terms()
        .iter()
        .find(|(_, c)| !c.is_zero())
        .map(|(n, _)| (*n).min(0))
        .unwrap_or(0);
    // generous box: both embeddings of nu d stay within +-(bound + sqrt|N| N(d) + 1)
    let nd = {
        let dd = pair_mul(p, &d, &conj(&d));
        dd.0.to_integer()
    };
    let nd_f = nd.to_f64()?;
    let reach = bound as f64 + ((-deepest) as f64 * nd_f / p as f64).sqrt() + 1.0;
    let dmin = {
        let sp = (p as f64).sqrt();
        let a = d1.to_f64()?;
        let b = d2.to_f64()?;
        ((a + b * sp) / 2.0).min((a - b * sp) / 2.0)
    };
    let emb = reach / dmin;
    let bmax = (2.0 * emb).ceil() as i64 + 2;
    let amax = (2.0 * emb * (p as f64).sqrt()).ceil() as i64 + 2;

    let mut factors: Vec<((i64, i64), i64, BigInt)> = Vec::new();
    for a in -amax..=amax {
        for b in -bmax..=bmax {
            if (a - b).rem_euclid(2) != 0 || (a == 0 && b == 0) {
                continue;
            }
            // tr(nu d) = (b d1 + a d2) / 2
            let pairing2 = BigInt::from(b) * &d1 + BigInt::from(a) * &d2;
            let pairing = i64::try_from(pairing2 / 2).ok()?;
            if pairing <= 0 || pairing > bound {
                continue;
            }
            let nu = nu_pair(p, a, b);
            let side = pair_add(&pair_mul(p, &nu, &y1), &pair_mul(p, &conj(&nu), &y2));
            if pair_sign(p, &side) <= 0 {
                continue;
            }
            // p N(nu) = (p b^2 - a^2) / 4
            let m = (p * b * b - a * a) / 4;
            let coeff = f.coeff(m)?;
            let s = if m % p == 0 { 2 } else { 1 };
            let c = coeff * q(s);
            if !c.is_integer() {
                return None;
            }
            let c = c.to_integer();
            if !c.is_zero() {
                factors.push(((a, b), pairing, c));
            }
        }
    }

    let mut acc: HashMap<(i64, i64), (i64, BigRational)> = HashMap::new();
    acc.insert((0, 0), (0, BigRational::one()));
    for ((a, b), pairing, c) in factors {
        // (1 - x)^c = sum g_k x^k, g_k = g_{k-1} (k - 1 - c) / k
        let cq = BigRational::from_integer(c);
        let mut g = vec![BigRational::one()];
        let mut k = 1;
        while k * pairing <= bound {
            let prev = g.last().unwrap().clone();
            g.push(prev * (q(k - 1) - &cq) / q(k));
            k += 1;
        }
        let mut next: HashMap<(i64, i64), (i64, BigRational)> = HashMap::new();
        for (key, (pw, x)) in &acc {
            for (k, gk) in g.iter().enumerate() {
                let k = k as i64;
                let total = pw + k * pairing;
                if total > bound {
                    break;
                }
                if gk.is_zero() {
                    continue;
                }
                let idx = (key.0 + k * a, key.1 + k * b);
                let slot = next.entry(idx).or_insert((total, BigRational::zero()));
                slot.1 += x * gk;
            }
        }
        next.retain(|_, v| !v.1.is_zero());
        acc = next;
    }
    let constant = acc
        .remove(&(0, 0))
        .map(|v| v.1)
        .unwrap_or_else(BigRational::zero);
    let terms = acc
        .into_iter()
        .map(|((a, b), (_, c))| (CodiffElem::from_coords(p, (a - b) / 2, b), c))
        .collect();
    Some(OracleExpansion { constant, terms })
}

/// `sum_{n<0} s(n) a(n) sum_{lambda > 0, N(lambda) = n/p} min(|lambda y1|, |lambda' y2|)`
/// in floating point, scanning `lambda = (a + b sqrt p)/(2 sqrt p)` with `|b| <= b_max`.
pub fn weyl_min_formula(f: &ScalarForm, y1: f64, y2: f64, b_max: i64) -> f64 {
    let p = f.p();
    let sp = (p as f64).sqrt();
    let mut total = 0.0;
    for (n, c) in f.series().numerator_terms() {
        if *n >= 0 || c.is_zero() {
            continue;
        }
        let s = if n % p == 0 { 2.0 } else { 1.0 };
        let weight = s * c.to_f64().unwrap_or(f64::NAN);
        for b in -b_max..=b_max {
            // a^2 = p b^2 - 4n
            let a2 = p as i128 * (b as i128) * (b as i128) - 4 * *n as i128;
            let r = (a2 as f64).sqrt().round() as i128;
            let root = (r - 1..=r + 1).find(|x| *x >= 0 && x * x == a2);
            let Some(root) = root else { continue };
            let roots = if root == 0 {
                vec![0]
            } else {
                vec![root, -root]
            };
            for a in roots {
                if (a - b as i128).rem_euclid(2) != 0 {
                    continue;
                }
                let lam = b as f64 / 2.0 + a as f64 / (2.0 * sp);
                let lamc = b as f64 / 2.0 - a as f64 / (2.0 * sp);
                if lam <= 0.0 {
                    continue;
                }
                total += weight * (lam * y1).abs().min((lamc * y2).abs());
            }
        }
    }
    total
}
