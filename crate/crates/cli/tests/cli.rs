use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hallpi::glhall::{Certificate, WitnessStatus};
use hallpi::records::{self, Record};

fn hallpi(args: &[&str]) -> Output {
    hallpi_in(None, args, &[])
}

fn hallpi_in(dir: Option<&Path>, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hallpi"));
    cmd.args(args).env_remove("HALLPI_BOUND");
    if let Some(d) = dir {
        cmd.current_dir(d);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn classify_examples() {
    let o = hallpi(&["classify", "--family", "A", "--rank", "1", "--q", "7", "--pi", "3,7"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("status     Dpi"));
    assert!(stdout(&o).contains("condition  Condition I"));

    let o = hallpi(&["classify", "--family", "A", "--rank", "2", "--q", "11", "--pi", "3,5"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("EpiNotDpi"));
    assert!(stdout(&o).contains("Item II-B(a)"));

    let o = hallpi(&["classify", "--group", "A1(7)", "--pi", "2,3"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("Undetermined"));
    assert!(stdout(&o).contains("2∈π"));

    let o = hallpi(&["classify", "--group", "A1(11)", "--pi", "3,5"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NotEpi"));
}

#[test]
fn twisted_family_flag() {
    let a = hallpi(&["classify", "--family", "A", "--twist", "2", "--rank", "2", "--q", "4", "--pi", "3,5"]);
    let b = hallpi(&["classify", "--group", "2A2(4)", "--pi", "3,5"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&a), code(&b));
}

#[test]
fn exit_codes_ignore_format() {
    for args in [
        vec!["classify", "--group", "A1(7)", "--pi", "3,7"],
        vec!["classify", "--group", "A2(11)", "--pi", "3,5"],
        vec!["classify", "--group", "A1(7)", "--pi", "2,3"],
        vec!["classify", "--group", "O'N", "--pi", "3,5"],
    ] {
        let text = hallpi(&args);
        let mut rec_args = vec!["--format", "records"];
        rec_args.extend(&args);
        let rec = hallpi(&rec_args);
        assert_eq!(code(&text), code(&rec), "{args:?}");
        let parsed = records::parse(&stdout(&rec)).unwrap();
        let [Record::Verdict(v)] = &parsed[..] else { panic!("{parsed:?}") };
        assert_eq!(v.status.exit_code(), code(&text));
        assert_eq!(records::render(&parsed), stdout(&rec));
    }
}

#[test]
fn selected_criteria() {
    let o = hallpi(&["classify", "--group", "A2(11)", "--pi", "3,5", "--criteria", "condition-I,condition-II"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NotEpi"));
    let o = hallpi(&["classify", "--group", "A2(11)", "--pi", "3,5", "--criteria", "condition-V"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("condition-V"));
}

#[test]
fn orders() {
    let o = hallpi(&["order", "--gl", "3", "+", "11"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2⁵·3·5³·7·11³·19"));
    let o = hallpi(&["order", "--gl", "3", "-", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("|GU3(4)| = 2⁶·3·5³·13"));
    let o = hallpi(&["order", "--group", "A1(7)"]);
    assert!(stdout(&o).contains("2³·3·7"));
    for strategy in ["enumeration", "schreier-sims"] {
        let o = hallpi(&["order", "--catalog-group", "A7", "--strategy", strategy]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).contains("= 2520"), "{strategy}");
    }
    let o = hallpi(&["order", "--catalog-group", "A7", "--strategy", "guess"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn hall_orders() {
    let o = hallpi(&["hall-order", "--gl", "3", "+", "11", "--pi", "3,5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("= 3·5³"));
    let o = hallpi(&["hall-order", "--gl", "3", "-", "4", "--pi", "3,5"]);
    assert!(stdout(&o).contains("= 3·5³"));
    let o = hallpi(&["hall-order", "--gl", "2", "+", "11", "--pi", "3,5"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bracket equality"));
}

fn check_construction(dir: &Path) {
    for name in ["T", "R", "TR", "K_t5", "R1_t5"] {
        let text = fs::read_to_string(dir.join(format!("{name}.cert"))).unwrap();
        let cert: Certificate = text.parse().unwrap();
        assert!(cert.verified, "{name}");
        let field = cert.field().unwrap();
        assert_eq!(cert.matrices(&field).len(), cert.generators.len());
        if name == "TR" {
            assert_eq!(cert.order, Some(375));
        }
    }
    let recs = records::parse(&fs::read_to_string(dir.join("witness.jsonl")).unwrap()).unwrap();
    let Record::Witness(w) = &recs[0] else { panic!() };
    assert_eq!(w.status, WitnessStatus::Certified);
    assert_eq!(w.scans[0].max_t_rank, Some(1));
    assert_eq!(w.scans[0].witness_rank, 2);
}

#[test]
fn constructions() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hallpi_in(Some(tmp.path()), &["construct", "--gl", "3", "+", "11", "--pi", "3,5"], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("TR         order 375"));
    assert!(stdout(&o).contains("witness    certified"));
    check_construction(&tmp.path().join("construct-GL3_11-pi3_5"));

    let out = tmp.path().join("gu");
    let o = hallpi(&["construct", "--gl", "3", "-", "4", "--pi", "3,5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("GF(16)"));
    check_construction(&out);
}

#[test]
fn construction_outside_regime() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hallpi_in(Some(tmp.path()), &["construct", "--gl", "2", "+", "11", "--pi", "3,5"], &[]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("not applicable"));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn small_bound_marks_certificates_unverified() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hallpi_in(
        Some(tmp.path()),
        &["construct", "--gl", "3", "+", "11", "--pi", "3,5", "--out", "c"],
        &[("HALLPI_BOUND", "100")],
    );
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("unverified"));
    let cert: Certificate = fs::read_to_string(tmp.path().join("c/TR.cert")).unwrap().parse().unwrap();
    assert!(!cert.verified);
    assert_eq!(cert.order, None);
    let o = hallpi_in(
        Some(tmp.path()),
        &["--bound", "100000", "construct", "--gl", "3", "+", "11", "--pi", "3,5", "--out", "d"],
        &[("HALLPI_BOUND", "100")],
    );
    assert_eq!(code(&o), 0);
}

#[test]
fn crosscheck_shipped_catalog() {
    let o = hallpi(&["crosscheck"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(", 0 failures"));

    let o = hallpi(&["--format", "records", "crosscheck", "--pi", "3,5", "--pi", "3,7", "--pi", "5,7", "--pi", "3,13"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<_> = records::parse(&stdout(&o))
        .unwrap()
        .into_iter()
        .map(|r| match r {
            Record::Crosscheck(row) => row,
            other => panic!("{other:?}"),
        })
        .collect();
    let keys: Vec<_> = rows.iter().map(|r| (r.group.clone(), r.pi.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(rows.iter().all(|r| !r.failed()));
}

#[test]
fn crosscheck_oracle_only_row() {
    let o = hallpi(&["crosscheck", "--pi", "2,3"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().find(|l| l.starts_with("PSL2(7) ")).unwrap().to_string();
    assert!(line.contains("classes=2"));
    assert!(line.contains("C=false"));
    assert!(line.contains("oracle-only"));
}

#[test]
fn crosscheck_rejects_empty_pi_and_bad_catalogs() {
    let o = hallpi(&["crosscheck", "--pi", ""]);
    assert_eq!(code(&o), 3);
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.txt");
    fs::write(&path, "name: X\ndegree: 3\ngen: (1,2,9)\n").unwrap();
    let o = hallpi(&["crosscheck", "--catalog", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn crosscheck_reports_disagreement() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("wrong.txt");
    fs::write(&path, "name: mislabelled\ndegree: 8\ngen: (1,2,3,4,5,6,7)\ngen: (1,8)(2,7)(3,4)(5,6)\nlie: A1(8)\n")
        .unwrap();
    let o = hallpi(&["crosscheck", "--catalog", path.to_str().unwrap(), "--pi", "3,7"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("DISAGREE"));
    assert!(stdout(&o).contains("FAIL mislabelled"));
}

#[test]
fn usage_errors_do_not_collide_with_verdicts() {
    let o = hallpi(&["classify", "--pi", "3,5", "--group", "A1(7)", "--family", "A"]);
    assert_eq!(code(&o), 3);
    let o = hallpi(&["frobnicate"]);
    assert_eq!(code(&o), 3);
    let o = hallpi(&["classify", "--group", "A1(6)", "--pi", "3"]);
    assert_eq!(code(&o), 3);
    let o = hallpi(&["--help"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn criteria_listing() {
    let o = hallpi(&["criteria"]);
    assert_eq!(code(&o), 0);
    for name in ["condition-I", "condition-IV", "epi-II-B", "definition", "maximal-classes", "schreier-sims"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
}
