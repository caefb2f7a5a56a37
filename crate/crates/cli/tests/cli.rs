use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use prime_borcherds::borcherds::product::default_grading_direction;
use prime_borcherds::borcherds::standard_chamber;
use prime_borcherds::gamma0::{construct_fm_p5, ScalarForm};
use prime_borcherds::quadfield::{CodiffElem, QFieldElem, QFieldRepr};
use prime_borcherds::rational;
use prime_borcherds::verify::oracle::brute_force_product;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prime-borcherds"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn fm_p5_m1_prints_table() {
    let out = run(&["fm", "--p", "5", "--m", "1", "--prec", "15"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains(
        "q^-1 + 5 + 11*q - 54*q^4 + 55*q^5 + 44*q^6 - 395*q^9 + 340*q^10 + 296*q^11 - 1836*q^14 + O(q^15)"
    ));
}

#[test]
fn fm_json_is_readable_form() {
    let out = run(&["fm", "--p", "5", "--m", "1", "--format", "json"]);
    assert!(out.status.success());
    let f: ScalarForm = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(f.truncation(), 26);
    assert_eq!(f, construct_fm_p5(1, 26).unwrap());
}

#[test]
fn fm_m2_exits_2() {
    let out = run(&["fm", "--p", "5", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("chi_5(2) = -1"));
}

#[test]
fn missing_file_exits_1() {
    let out = run(&["lift", "/nonexistent/form.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"p\": 5}").unwrap();
    let out = run(&["project", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn p13_without_seeds_exits_2() {
    let out = run(&["fm", "--p", "13", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn p13_uses_seed_file() {
    let seeds = data("seeds13.json");
    let out = run(&[
        "fm",
        "--p",
        "13",
        "--m",
        "3",
        "--prec",
        "5",
        "--seeds",
        seeds.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // second seed minus 5 times the first
    assert!(stdout(&out).contains("q^-3 - 8 + q - 10*q^3 + O(q^5)"));

    let out = run(&[
        "fm",
        "--p",
        "13",
        "--m",
        "3",
        "--seeds",
        seeds.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("insufficient precision"));
}

#[test]
fn lift_then_project_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for m in ["1", "4", "6"] {
        let f = dir.path().join(format!("f{m}.json"));
        let v = dir.path().join(format!("v{m}.json"));
        let g = dir.path().join(format!("g{m}.json"));
        let path = |p: &PathBuf| p.to_str().unwrap().to_string();
        assert!(run(&[
            "fm",
            "--p",
            "5",
            "--m",
            m,
            "--format",
            "json",
            "-o",
            &path(&f)
        ])
        .status
        .success());
        assert!(
            run(&["lift", &path(&f), "--format", "json", "-o", &path(&v)])
                .status
                .success()
        );
        assert!(
            run(&["project", &path(&v), "--format", "json", "-o", &path(&g)])
                .status
                .success()
        );
        let a: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let b: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
        assert_eq!(a, b, "m = {m}");
        let lifted: Value = serde_json::from_str(&std::fs::read_to_string(&v).unwrap()).unwrap();
        assert_eq!(lifted["components"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "borcherds",
        "--p",
        "5",
        "--m",
        "1",
        "--trace-bound",
        "8",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    let c = bin()
        .args(args)
        .env("PRIME_BORCHERDS_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn bad_thread_count_exits_1() {
    let out = bin()
        .args(["signature-table"])
        .env("PRIME_BORCHERDS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

fn elem(v: &Value) -> QFieldElem {
    let repr: QFieldRepr = serde_json::from_value(v.clone()).unwrap();
    QFieldElem::from_repr(5, &repr).unwrap()
}

#[test]
fn borcherds_json_matches_golden_and_oracle() {
    let out = run(&[
        "borcherds",
        "--p",
        "5",
        "--m",
        "1",
        "--trace-bound",
        "10",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let golden = std::fs::read_to_string(data("borcherds_p5_m1_t10.json")).unwrap();
    assert_eq!(stdout(&out), golden);

    let json: Value = serde_json::from_str(&golden).unwrap();
    let f = construct_fm_p5(1, 60).unwrap();
    let w = standard_chamber(&f).unwrap();
    let d = default_grading_direction(&w).unwrap();
    assert_eq!(elem(&json["grading_direction"]), d);
    let (y1, y2) = w.interior_point();
    let oracle = brute_force_product(&f, y1, y2, &d, 10).unwrap();
    assert_eq!(
        rational::parse(json["constant"].as_str().unwrap()).unwrap(),
        oracle.constant
    );
    let terms: BTreeMap<CodiffElem, _> = json["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let nu = CodiffElem::new(&elem(&t["nu"])).unwrap();
            (nu, rational::parse(t["c"].as_str().unwrap()).unwrap())
        })
        .collect();
    assert_eq!(terms, oracle.terms);
}

#[test]
fn signature_table_has_four_rows() {
    let out = run(&["signature-table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let last: Vec<String> = rows
        .iter()
        .map(|r| r.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    assert_eq!(last, ["1 +1 0", "3 +1 2", "1 -1 4", "3 -1 6"]);
}

#[test]
fn gauss_sum_agrees() {
    let out = run(&["gauss-sum", "--p", "7", "--alpha", "3", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sign"], -1);
    assert_eq!(v["eps_p"], "i");
    assert_eq!(v["agrees"], true);
}

#[test]
fn obstructions_report_a0() {
    let pp = data("pp.json");
    let out = run(&[
        "obstructions",
        "--p",
        "5",
        "--pp",
        pp.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["a0"], "5");
}

#[test]
fn weyl_vector_of_f1() {
    let out = run(&["weyl-vector", "--p", "5", "--m", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // eps0 / sqrt5
    assert_eq!(elem(&v["rho"]), QFieldElem::from_fraction(5, 5, 1, 10));
}

#[test]
fn weyl_vector_on_wall_exits_2() {
    // 1/sqrt5 * 1 + (-1/sqrt5) * 1 = 0
    let out = run(&[
        "weyl-vector",
        "--p",
        "5",
        "--m",
        "1",
        "--y1",
        "1,0",
        "--y2",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eisenstein_plus_weight_2() {
    let out = run(&[
        "eisenstein",
        "--kappa",
        "2",
        "--delta",
        "1",
        "--p",
        "5",
        "--prec",
        "8",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("1 - 10*q - 30*q^4 - 30*q^5 - 20*q^6 + O(q^8)"));
}

#[test]
fn verify_passes() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
