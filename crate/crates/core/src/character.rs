//! Quadratic characters, Gauss sums, discriminant-form bookkeeping and
//! L-values at negative integers.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric tolerance for Gauss-sum and Milgram checks.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn require_odd_prime(p: i64) -> Result<()> {
    if p > 2 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not an odd prime")))
    }
}

/// Legendre symbol `(n / p)` by Euler's criterion.
pub fn legendre_chi(n: i64, p: i64) -> i32 {
    debug_assert!(p > 2 && is_prime(p));
    let r = n.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    let mut base = r as u128;
    let modulus = p as u128;
    let mut e = (p - 1) / 2;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// The fourth root of unity `eps_p`: 1 for `p = 1 mod 4`, `i` for `p = 3 mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsP {
    One,
    I,
}

impl EpsP {
    pub fn of(p: i64) -> Self {
        if p % 4 == 1 {
            EpsP::One
        } else {
            EpsP::I
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            EpsP::One => Complex64::new(1.0, 0.0),
            EpsP::I => Complex64::new(0.0, 1.0),
        }
    }
}

/// `chi_p(alpha) * eps_p * sqrt(p)`, kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussSumClosedForm {
    pub sign: i32,
    pub eps_p: EpsP,
    pub p: i64,
}

impl GaussSumClosedForm {
    pub fn to_complex(self) -> Complex64 {
        self.eps_p.to_complex() * (self.sign as f64) * (self.p as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GaussSum {
    pub numeric: Complex64,
    pub closed_form: GaussSumClosedForm,
}

impl GaussSum {
    pub fn agrees(&self) -> bool {
        (self.numeric - self.closed_form.to_complex()).norm() < NUMERIC_TOLERANCE
    }
}

/// Brute-force `sum_{x mod p} e(alpha x^2 / p)` together with its closed form.
pub fn quadratic_gauss_sum(alpha: i64, p: i64) -> Result<GaussSum> {
    require_odd_prime(p)?;
    if alpha.rem_euclid(p) == 0 {
        return Err(Error::invalid(format!(
            "alpha = {alpha} is divisible by p = {p}"
        )));
    }
    let numeric = (0..p)
        .map(|x| e(((alpha * x * x).rem_euclid(p)) as f64 / p as f64))
        .sum();
    let closed_form = GaussSumClosedForm {
        sign: legendre_chi(alpha, p),
        eps_p: EpsP::of(p),
        p,
    };
    Ok(GaussSum {
        numeric,
        closed_form,
    })
}

/// Signature `r mod 8` of an even lattice whose discriminant form is
/// `F_p` with quadratic form of type `epsilon`.
pub fn signature_mod8(p: i64, epsilon: i32) -> u8 {
    match (p % 4 == 1, epsilon > 0) {
        (true, true) => 0,
        (false, true) => 2,
        (true, false) => 4,
        (false, false) => 6,
    }
}

/// The discriminant form `(F_p, alpha x^2 / p)` with its derived invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantFormInfo {
    pub p: i64,
    pub alpha: i64,
    pub epsilon: i32,
    pub r_mod8: u8,
    pub delta: i32,
    pub eps_p: EpsP,
}

impl DiscriminantFormInfo {
    pub fn new(p: i64, alpha: i64) -> Result<Self> {
        require_odd_prime(p)?;
        let alpha = alpha.rem_euclid(p);
        if alpha == 0 {
            return Err(Error::invalid("alpha must be a unit mod p"));
        }
        let epsilon = legendre_chi(alpha, p);
        Ok(DiscriminantFormInfo {
            p,
            alpha,
            epsilon,
            r_mod8: signature_mod8(p, epsilon),
            delta: legendre_chi(-1, p) * epsilon,
            eps_p: EpsP::of(p),
        })
    }

    /// Canonical generator for the requested type: 1 for `epsilon = +1`,
    /// the least positive non-residue otherwise.
    pub fn canonical(p: i64, epsilon: i32) -> Result<Self> {
        require_odd_prime(p)?;
        let alpha = if epsilon > 0 {
            1
        } else {
            (2..p)
                .find(|&a| legendre_chi(a, p) == -1)
                .expect("odd primes have non-residues")
        };
        Self::new(p, alpha)
    }

    /// The form `-q`, whose Weil representation is the dual one.
    pub fn dual(&self) -> Self {
        Self::new(self.p, -self.alpha).expect("negation keeps alpha a unit")
    }

    /// `q(gamma) = alpha gamma^2 / p mod 1`, as a numerator over `p`.
    pub fn q_numerator(&self, gamma: i64) -> i64 {
        (self.alpha * gamma * gamma).rem_euclid(self.p)
    }

    /// `(gamma, delta) = 2 alpha gamma delta / p mod 1`, as a numerator over `p`.
    pub fn bilinear_numerator(&self, gamma: i64, delta: i64) -> i64 {
        (2 * self.alpha * gamma * delta).rem_euclid(self.p)
    }

    /// `|eps * eps_p - e(r/8)|`.
    pub fn table_defect(&self) -> f64 {
        let lhs = self.eps_p.to_complex() * self.epsilon as f64;
        (lhs - e(self.r_mod8 as f64 / 8.0)).norm()
    }
}

/// Milgram's formula `sum_gamma e(q(gamma)) = sqrt(p) e(r/8)`, checked numerically.
pub fn milgram_check(info: &DiscriminantFormInfo) -> bool {
    let lhs: Complex64 = (0..info.p)
        .map(|g| e(info.q_numerator(g) as f64 / info.p as f64))
        .sum();
    let rhs = e(info.r_mod8 as f64 / 8.0) * (info.p as f64).sqrt();
    (lhs - rhs).norm() < NUMERIC_TOLERANCE
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // sum_{k=0}^{m} binom(m+1, k) B_k = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // binom(m+1, k)
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Bernoulli polynomial `B_n(x)` evaluated at a rational point.
pub fn bernoulli_polynomial(n: usize, x: &BigRational) -> BigRational {
    let b = bernoulli_numbers(n);
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one(); // binom(n, k)
    for (k, bk) in b.iter().enumerate() {
        acc += BigRational::from_integer(binom.clone()) * bk * x.pow((n - k) as i32);
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    acc
}

/// Generalized Bernoulli number `B_{kappa, chi_p} = p^(kappa-1) sum_{a=1}^p chi_p(a) B_kappa(a/p)`.
pub fn generalized_bernoulli(kappa: u32, p: i64) -> BigRational {
    let mut acc = BigRational::zero();
    for a in 1..=p {
        let c = legendre_chi(a, p);
        if c == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(p));
        let v = bernoulli_polynomial(kappa as usize, &x);
        if c > 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc * BigRational::from_integer(BigInt::from(p).pow(kappa - 1))
}

/// `L(1 - kappa, chi_p) = -B_{kappa, chi_p} / kappa`.
pub fn l_value_1_minus_kappa(kappa: u32, p: i64) -> Result<BigRational> {
    require_odd_prime(p)?;
    if kappa < 2 {
        return Err(Error::invalid("kappa must be at least 2"));
    }
    Ok(-generalized_bernoulli(kappa, p) / BigRational::from_integer(BigInt::from(kappa)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_chi(4, 5), 1);
        assert_eq!(legendre_chi(2, 5), -1);
        assert_eq!(legendre_chi(10, 5), 0);
        assert_eq!(legendre_chi(-1, 7), -1);
        assert_eq!(legendre_chi(-1, 13), 1);
    }

    #[test]
    fn legendre_is_multiplicative_and_balanced() {
        for p in [3, 5, 7, 11, 13] {
            for m in -20..20 {
                for n in -20..20 {
                    assert_eq!(
                        legendre_chi(m * n, p),
                        legendre_chi(m, p) * legendre_chi(n, p)
                    );
                }
            }
            let plus = (1..p).filter(|&n| legendre_chi(n, p) == 1).count() as i64;
            assert_eq!(plus, (p - 1) / 2);
            assert_eq!(legendre_chi(0, p), 0);
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g = quadratic_gauss_sum(1, 5).unwrap();
        assert!((g.numeric - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-9);
        assert!(g.agrees());
        let g = quadratic_gauss_sum(2, 5).unwrap();
        assert!((g.numeric - Complex64::new(-(5f64.sqrt()), 0.0)).norm() < 1e-9);
        let g = quadratic_gauss_sum(1, 3).unwrap();
        assert!((g.numeric - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-9);
        assert_eq!(g.closed_form.eps_p, EpsP::I);
        assert!(quadratic_gauss_sum(10, 5).is_err());
    }

    #[test]
    fn gauss_sums_agree_up_to_23() {
        for p in [3, 5, 7, 11, 13, 17, 19, 23] {
            for alpha in 1..p {
                assert!(
                    quadratic_gauss_sum(alpha, p).unwrap().agrees(),
                    "p={p} alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn signature_table_from_milgram() {
        assert_eq!(signature_mod8(5, 1), 0);
        assert_eq!(signature_mod8(7, 1), 2);
        assert_eq!(signature_mod8(13, -1), 4);
        assert_eq!(signature_mod8(3, -1), 6);
        for p in [3, 5, 7, 11, 13, 17, 19, 23] {
            for alpha in 1..p {
                let info = DiscriminantFormInfo::new(p, alpha).unwrap();
                assert!(milgram_check(&info), "p={p} alpha={alpha}");
                assert!(info.table_defect() < 1e-9);
            }
        }
    }

    #[test]
    fn milgram_detects_inconsistent_info() {
        let mut info = DiscriminantFormInfo::new(5, 1).unwrap();
        info.r_mod8 = 4;
        assert!(!milgram_check(&info));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(6);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat(0, 1));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(
            bernoulli_polynomial(2, &rat(1, 3)),
            rat(1, 9) - rat(1, 3) + rat(1, 6)
        );
    }

    #[test]
    fn l_values() {
        assert_eq!(l_value_1_minus_kappa(2, 5).unwrap(), rat(-2, 5));
        let v13 = l_value_1_minus_kappa(2, 13).unwrap();
        assert!(!v13.is_zero());
        assert_eq!(v13, rat(-2, 1));
        assert!(l_value_1_minus_kappa(1, 5).is_err());
    }

    #[test]
    fn dual_form_uses_delta() {
        let info = DiscriminantFormInfo::new(7, 1).unwrap();
        let dual = info.dual();
        assert_eq!(dual.epsilon, info.delta);
        assert_eq!((info.r_mod8 + dual.r_mod8) % 8, 0);
    }
}
