//! Vector-valued forms for the Weil representation of `(F_p, alpha x^2/p)` and
//! the isomorphism with the scalar spaces `A_k^eps(p, chi_p)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::character::{e, DiscriminantFormInfo, NUMERIC_TOLERANCE};
use crate::error::{Error, Result};
use crate::gamma0::{Holomorphy, ScalarForm, Sign};
use crate::rational::{int, rat};
use crate::series::{Exponent, FracQSeries};

/// `F = sum_gamma F_gamma e_gamma`, components indexed by `gamma = 0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorForm {
    info: DiscriminantFormInfo,
    weight: i64,
    components: Vec<FracQSeries>,
}

impl VectorForm {
    /// Checks the support law `n in Z + q(gamma)` and `F_gamma = F_{-gamma}`.
    pub fn new(
        info: DiscriminantFormInfo,
        weight: i64,
        components: Vec<FracQSeries>,
    ) -> Result<Self> {
        let p = info.p;
        if components.len() != p as usize {
            return Err(Error::invalid(format!(
                "expected {p} components, got {}",
                components.len()
            )));
        }
        let mut normalized = Vec::with_capacity(components.len());
        for (gamma, c) in components.into_iter().enumerate() {
            if p % c.exponent_denominator() != 0 {
                let r = c.reduce_denominator();
                if p % r.exponent_denominator() != 0 {
                    return Err(Error::invalid(format!(
                        "component {gamma} has exponents outside (1/{p})Z"
                    )));
                }
                normalized.push(r.with_denominator(p));
            } else {
                normalized.push(c.with_denominator(p));
            }
        }
        for (gamma, c) in normalized.iter().enumerate() {
            let q = info.q_numerator(gamma as i64);
            if let Some(n) = c
                .numerator_terms()
                .keys()
                .find(|n| (*n - q).rem_euclid(p) != 0)
            {
                return Err(Error::invalid(format!(
                    "component {gamma} has a term at q^({n}/{p}), outside Z + {q}/{p}"
                )));
            }
        }
        for gamma in 1..p as usize {
            if normalized[gamma] != normalized[p as usize - gamma] {
                return Err(Error::invalid(format!(
                    "components {gamma} and {} differ",
                    p as usize - gamma
                )));
            }
        }
        Ok(VectorForm {
            info,
            weight,
            components: normalized,
        })
    }

    pub fn info(&self) -> &DiscriminantFormInfo {
        &self.info
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn components(&self) -> &[FracQSeries] {
        &self.components
    }

    pub fn component(&self, gamma: i64) -> &FracQSeries {
        &self.components[gamma.rem_euclid(self.info.p) as usize]
    }

    /// Coefficient `a(gamma, n)`.
    pub fn coeff(&self, gamma: i64, n: Exponent) -> Option<BigRational> {
        self.component(gamma).coeff(n)
    }
}

fn check_parity(info: &DiscriminantFormInfo, weight: i64) -> Result<()> {
    let half_r = info.r_mod8 as i64 / 2;
    if (weight - half_r).rem_euclid(2) != 0 {
        return Err(Error::invalid(format!(
            "weight {weight} is not congruent to r/2 = {half_r} mod 2"
        )));
    }
    Ok(())
}

/// `F_0 = 2 sum_{p | n} a(n) q^(n/p)`, `F_gamma = sum_{n = alpha gamma^2 mod p} a(n) q^(n/p)`.
pub fn lift_scalar_to_vector(f: &ScalarForm, info: &DiscriminantFormInfo) -> Result<VectorForm> {
    let p = info.p;
    if f.p() != p {
        return Err(Error::invalid(
            "level of the form and discriminant form differ",
        ));
    }
    if f.sign().as_i32() != info.epsilon {
        return Err(Error::invalid(format!(
            "form has sign {:?} but the discriminant form has epsilon = {}",
            f.sign(),
            info.epsilon
        )));
    }
    check_parity(info, f.weight())?;
    let series = f.series();
    let truncation = series.truncation() / p;
    let components = (0..p)
        .map(|gamma| {
            let q = info.q_numerator(gamma);
            let factor = if gamma == 0 { int(2) } else { int(1) };
            let terms = series
                .numerator_terms()
                .iter()
                .filter(|(n, _)| (*n - q).rem_euclid(p) == 0)
                .map(|(n, c)| (*n, c * &factor));
            FracQSeries::new(p, terms, truncation)
        })
        .collect();
    VectorForm::new(info.clone(), f.weight(), components)
}

/// `f = (1/2) sum_gamma F_gamma(p tau)`.
pub fn project_vector_to_scalar(form: &VectorForm) -> Result<ScalarForm> {
    let p = form.info.p;
    let mut acc: Option<FracQSeries> = None;
    for c in &form.components {
        let r = c.rescale(p);
        acc = Some(match acc {
            None => r,
            Some(a) => a.add(&r),
        });
    }
    let sum = acc
        .expect("at least one component")
        .scale(&rat(1, 2))
        .reduce_denominator();
    if !sum.has_integral_exponents() {
        return Err(Error::invalid("projection has non-integral exponents"));
    }
    let series = sum.with_denominator(1);
    let holomorphy = if series.min_exponent().is_some_and(|v| v < Exponent::zero()) {
        Holomorphy::NearlyHolomorphic
    } else {
        Holomorphy::Holomorphic
    };
    ScalarForm::new(
        p,
        form.weight,
        Sign::from_i32(form.info.epsilon),
        holomorphy,
        series,
    )
}

#[derive(Serialize, Deserialize)]
struct VectorFormRepr {
    p: i64,
    alpha: i64,
    epsilon: i32,
    r_mod8: u8,
    weight: i64,
    components: Vec<FracQSeries>,
}

impl Serialize for VectorForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorFormRepr {
            p: self.info.p,
            alpha: self.info.alpha,
            epsilon: self.info.epsilon,
            r_mod8: self.info.r_mod8,
            weight: self.weight,
            components: self.components.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = VectorFormRepr::deserialize(d)?;
        let info = DiscriminantFormInfo::new(r.p, r.alpha).map_err(D::Error::custom)?;
        if info.epsilon != r.epsilon || info.r_mod8 != r.r_mod8 {
            return Err(D::Error::custom(
                "epsilon or r_mod8 inconsistent with alpha",
            ));
        }
        VectorForm::new(info, r.weight, r.components).map_err(D::Error::custom)
    }
}

pub type Matrix = Vec<Vec<Complex64>>;

/// Numeric `rho(T)` and `rho(S)`.
#[derive(Clone, Debug)]
pub struct WeilRepMatrices {
    pub p: i64,
    pub r_mod8: u8,
    pub rho_t: Matrix,
    pub rho_s: Matrix,
}

/// `rho(T) e_gamma = e(q(gamma)) e_gamma`,
/// `rho(S) e_gamma = i^(-r/2) / sqrt(p) sum_delta e(-(gamma, delta)) e_delta`.
pub fn weil_matrices(info: &DiscriminantFormInfo) -> WeilRepMatrices {
    let p = info.p;
    let n = p as usize;
    let pf = p as f64;
    let mut rho_t = vec![vec![Complex64::zero(); n]; n];
    for (g, row) in rho_t.iter_mut().enumerate() {
        row[g] = e(info.q_numerator(g as i64) as f64 / pf);
    }
    let prefactor = e(-(info.r_mod8 as f64) / 8.0) / pf.sqrt();
    let rho_s = (0..p)
        .map(|d| {
            (0..p)
                .map(|g| prefactor * e(-(info.bilinear_numerator(g, d) as f64) / pf))
                .collect()
        })
        .collect();
    WeilRepMatrices {
        p,
        r_mod8: info.r_mod8,
        rho_t,
        rho_s,
    }
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn adjoint(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

fn max_deviation(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Max entrywise deviations for the defining relations.
#[derive(Clone, Debug, Serialize)]
pub struct WeilRelationReport {
    /// `rho(S)^2` against `e_gamma -> (-1)^(r/2) e_{-gamma}`.
    pub s_squared: f64,
    /// `(rho(S) rho(T))^3` against `rho(S)^2`.
    pub st_cubed: f64,
    pub unitarity_s: f64,
    pub unitarity_t: f64,
}

impl WeilRelationReport {
    pub fn holds(&self) -> bool {
        [
            self.s_squared,
            self.st_cubed,
            self.unitarity_s,
            self.unitarity_t,
        ]
        .iter()
        .all(|d| *d < NUMERIC_TOLERANCE)
    }
}

pub fn verify_weil_relations(mats: &WeilRepMatrices) -> WeilRelationReport {
    let n = mats.p as usize;
    let sign = if (mats.r_mod8 / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let mut minus_e = vec![vec![Complex64::zero(); n]; n];
    for g in 0..n {
        minus_e[(n - g) % n][g] = Complex64::new(sign, 0.0);
    }
    let s2 = matmul(&mats.rho_s, &mats.rho_s);
    let st = matmul(&mats.rho_s, &mats.rho_t);
    let st3 = matmul(&st, &matmul(&st, &st));
    let id = identity(n);
    WeilRelationReport {
        s_squared: max_deviation(&s2, &minus_e),
        st_cubed: max_deviation(&st3, &s2),
        unitarity_s: max_deviation(&matmul(&mats.rho_s, &adjoint(&mats.rho_s)), &id),
        unitarity_t: max_deviation(&matmul(&mats.rho_t, &adjoint(&mats.rho_t)), &id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma0::{construct_f1_p5, construct_f4_p5, eisenstein_e_delta};

    fn hilbert_info() -> DiscriminantFormInfo {
        DiscriminantFormInfo::new(5, -1).unwrap()
    }

    #[test]
    fn lift_of_f1() {
        let f1 = construct_f1_p5(15).unwrap();
        let lifted = lift_scalar_to_vector(&f1, &hilbert_info()).unwrap();
        let f0 = lifted.component(0);
        assert_eq!(f0.coeff(Exponent::from_integer(0)), Some(int(10)));
        assert_eq!(f0.coeff(Exponent::from_integer(1)), Some(int(110)));
        assert_eq!(f0.coeff(Exponent::from_integer(2)), Some(int(680)));
        let f1c = lifted.component(1);
        assert_eq!(f1c.coeff(Exponent::new(4, 5)), Some(int(-54)));
        assert_eq!(f1c.coeff(Exponent::new(9, 5)), Some(int(-395)));
        assert_eq!(f1c.coeff(Exponent::new(14, 5)), Some(int(-1836)));
        assert_eq!(
            lifted.component(1).coeff(Exponent::new(-1, 5)),
            Some(int(1))
        );
        assert_eq!(project_vector_to_scalar(&lifted).unwrap(), f1);
    }

    #[test]
    fn round_trip_from_vector_side() {
        let f4 = construct_f4_p5(12).unwrap();
        let lifted = lift_scalar_to_vector(&f4, &hilbert_info()).unwrap();
        let back = project_vector_to_scalar(&lifted).unwrap();
        assert_eq!(
            lift_scalar_to_vector(&back, &hilbert_info()).unwrap(),
            lifted
        );
    }

    #[test]
    fn zero_lifts_to_zero() {
        let z = ScalarForm::new(
            5,
            0,
            Sign::Plus,
            Holomorphy::NearlyHolomorphic,
            FracQSeries::zero(1, Exponent::from_integer(5)),
        )
        .unwrap();
        let lifted = lift_scalar_to_vector(&z, &hilbert_info()).unwrap();
        assert!(lifted.components().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn sign_and_parity_preconditions() {
        let f1 = construct_f1_p5(6).unwrap();
        let minus = DiscriminantFormInfo::new(5, 2).unwrap();
        assert!(lift_scalar_to_vector(&f1, &minus).is_err());
        let odd = ScalarForm::new(
            5,
            1,
            Sign::Plus,
            Holomorphy::Holomorphic,
            FracQSeries::zero(1, Exponent::from_integer(3)),
        )
        .unwrap();
        assert!(lift_scalar_to_vector(&odd, &hilbert_info()).is_err());
    }

    #[test]
    fn dual_lift_of_e2_plus() {
        let e = eisenstein_e_delta(2, 1, 5, 15).unwrap();
        let dual = DiscriminantFormInfo::canonical(5, 1).unwrap().dual();
        let lifted = lift_scalar_to_vector(&e, &dual).unwrap();
        // q(1) = -1/5 mod 1 on the dual side; B(4) = -30 sits at q^(4/5)
        assert_eq!(
            lifted.component(1).coeff(Exponent::new(4, 5)),
            Some(int(-30))
        );
        assert_eq!(
            lifted.component(2).coeff(Exponent::new(1, 5)),
            Some(int(-10))
        );
    }

    #[test]
    fn broken_support_rejected() {
        let info = hilbert_info();
        let mut comps = vec![FracQSeries::zero(5, Exponent::from_integer(2)); 5];
        comps[1] = FracQSeries::new(5, [(1, int(1))], Exponent::from_integer(2));
        comps[4] = comps[1].clone();
        assert!(VectorForm::new(info, 0, comps).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f1 = construct_f1_p5(10).unwrap();
        let lifted = lift_scalar_to_vector(&f1, &hilbert_info()).unwrap();
        let text = serde_json::to_string(&lifted).unwrap();
        let back: VectorForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, lifted);
    }

    #[test]
    fn t_matrix_for_alpha_one() {
        let m = weil_matrices(&DiscriminantFormInfo::new(5, 1).unwrap());
        let expected = [0.0, 0.2, 0.8, 0.8, 0.2];
        for (g, x) in expected.iter().enumerate() {
            assert!((m.rho_t[g][g] - e(*x)).norm() < 1e-12);
        }
        let s00 = m.rho_s[0][0];
        assert!((s00 - Complex64::new(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn relations_hold() {
        for (p, alpha) in [
            (5, 1),
            (5, 2),
            (7, 1),
            (7, 3),
            (13, 1),
            (13, 2),
            (11, 1),
            (3, 1),
        ] {
            let info = DiscriminantFormInfo::new(p, alpha).unwrap();
            let report = verify_weil_relations(&weil_matrices(&info));
            assert!(report.holds(), "p = {p}, alpha = {alpha}: {report:?}");
        }
    }
}
