use prime_borcherds::borcherds::product::integrality_normalize;
use prime_borcherds::borcherds::{
    lift_metadata, obstruction_check, product_expansion, standard_chamber, walls_for,
    weyl_chamber_of, weyl_vector,
};
use prime_borcherds::gamma0::{construct_fm_p5, Holomorphy, ScalarForm, Sign};
use prime_borcherds::quadfield::{is_ideal_norm, Embedding, QFieldElem};
use prime_borcherds::rational::int;
use prime_borcherds::verify::oracle::{brute_force_product, weyl_min_formula};

fn sum(a: &ScalarForm, b: &ScalarForm) -> ScalarForm {
    ScalarForm::new(5, 0, Sign::Plus, Holomorphy::NearlyHolomorphic, a.series().add(b.series()))
        .unwrap()
}

/// The scan stops at |b| <= 2e6, so the geometric tail leaves an error near 1e-7.
fn check_min_formula(f: &ScalarForm, points: &[(i64, i64)]) {
    for &(a, b) in points {
        let y1 = QFieldElem::from_ints(5, a, 0);
        let y2 = QFieldElem::from_ints(5, b, 0);
        let w = weyl_chamber_of(f, &y1, &y2).unwrap();
        let rho = weyl_vector(f, &w).unwrap().rho;
        let exact = rho.to_f64(Embedding::First) * a as f64 + rho.to_f64(Embedding::Second) * b as f64;
        let numeric = weyl_min_formula(f, a as f64, b as f64, 2_000_000);
        assert!(
            (exact - numeric).abs() < 1e-5 * (1.0 + numeric.abs()),
            "point ({a}, {b}): {exact} vs {numeric}"
        );
    }
}

#[test]
fn single_pole_weyl_vector_matches_min_formula() {
    let f1 = construct_fm_p5(1, 2).unwrap();
    check_min_formula(&f1, &[(1, 2), (3, 5), (2, 9), (9, 2), (7, 50)]);
}

#[test]
fn two_orbit_weyl_vector_matches_min_formula() {
    let f11 = construct_fm_p5(11, 2).unwrap();
    assert_eq!(walls_for(&f11).unwrap().len(), 2);
    check_min_formula(&f11, &[(1, 2), (3, 5), (2, 9), (9, 2), (7, 50), (13, 14)]);
}

#[test]
fn multi_pole_weyl_vector_matches_min_formula() {
    let f1 = construct_fm_p5(1, 2).unwrap();
    let f11 = construct_fm_p5(11, 2).unwrap();
    let f = sum(&f1, &f11);
    check_min_formula(&f, &[(1, 2), (3, 5), (2, 9), (9, 2), (7, 50), (13, 14), (1, 3)]);
}

#[test]
fn f4_product_matches_oracle() {
    let f4 = construct_fm_p5(4, 40).unwrap();
    let w = standard_chamber(&f4).unwrap();
    let e = product_expansion(&f4, &w, None, 5).unwrap();
    let (y1, y2) = w.interior_point();
    let o = brute_force_product(&f4, y1, y2, &e.grading_direction, 5).unwrap();
    assert_eq!(o.constant, e.constant);
    assert_eq!(o.terms, e.terms);
}

#[test]
fn psi1_larger_window() {
    let f1 = construct_fm_p5(1, 26).unwrap();
    let w = standard_chamber(&f1).unwrap();
    let e = product_expansion(&f1, &w, None, 10).unwrap();
    let n = integrality_normalize(&e);
    assert_eq!(n.c, 1.into());
    assert_eq!(n.gcd, 1.into());
    let (y1, y2) = w.interior_point();
    let o = brute_force_product(&f1, y1, y2, &e.grading_direction, 10).unwrap();
    assert_eq!(o.terms, e.terms);
}

#[test]
fn compactness_dichotomy() {
    let one = QFieldElem::one(5);
    for m in 1..=30 {
        if prime_borcherds::character::legendre_chi(m, 5) == -1 {
            continue;
        }
        let f = construct_fm_p5(m, 1).unwrap();
        let compact = !is_ideal_norm(m, 5).unwrap();
        let walls = walls_for(&f).unwrap();
        assert_eq!(walls.is_empty(), compact, "m = {m}");
        if compact {
            assert!(weyl_chamber_of(&f, &one, &one).unwrap().is_whole_space());
        }
    }
}

#[test]
fn weight_agrees_with_obstruction_constant() {
    for m in 1..=20 {
        if prime_borcherds::character::legendre_chi(m, 5) == -1 {
            continue;
        }
        let f = construct_fm_p5(m, 1).unwrap();
        let meta = lift_metadata(&f).unwrap();
        let report = obstruction_check(&f.principal_part().unwrap(), &[]).unwrap();
        assert!(report.ok);
        assert_eq!(meta.weight, report.a0, "m = {m}");
    }
    let f9 = construct_fm_p5(9, 1).unwrap();
    let meta = lift_metadata(&f9).unwrap();
    assert_eq!(meta.weight, int(35));
    assert_eq!(meta.divisor, vec![(9, int(1))]);
}
