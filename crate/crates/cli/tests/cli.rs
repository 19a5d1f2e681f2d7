//! End-to-end runs of the `eis` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn eis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eis"))
        .args(args)
        .env_remove("EIS_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn records(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).expect("one JSON record per line")).collect()
}

fn single(args: &[&str]) -> Value {
    let out = eis(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs.len(), 1, "{recs:?}");
    recs.into_iter().next().unwrap()
}

#[test]
fn coefficient_examples() {
    let r = single(&["coeff", "-k", "4", "-c", "1:1", "1", "0", "0"]);
    assert_eq!((r["value"].as_str(), r["mode"].as_str()), (Some("240"), Some("exact")));
    assert_eq!(single(&["coeff", "-k", "4", "-c", "1:1", "0", "0", "0"])["value"], "1");
    assert_eq!(single(&["coeff", "-k", "4", "-c", "1:1", "1", "3", "1"])["value"], "0");
    assert_eq!(single(&["coeff", "-k", "4", "-c", "1:1", "1", "-1", "1"])["value"], "13440");
}

#[test]
fn record_fields_are_stable() {
    let r = single(&["coeff", "-k", "6", "-c", "1:1", "2", "1", "3"]);
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["m", "mode", "n", "notes", "r", "value"]);
}

#[test]
fn numeric_values_are_decimal_pairs() {
    let r = single(&["--precision", "96", "coeff", "-k", "5", "-c", "3:2", "1", "1", "9"]);
    assert_eq!(r["mode"], "numeric");
    let pair = r["value"].as_array().expect("[re, im]");
    assert_eq!(pair.len(), 2);
    assert!(pair.iter().all(|x| x.as_str().unwrap().parse::<f64>().is_ok()));
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("algebraicity")));
}

#[test]
fn expansion_matches_single_coefficients() {
    let out = eis(&["expand", "-k", "4", "-c", "1:1", "-b", "2"]);
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs[0]["header"], true);
    assert_eq!(recs[0]["precision_bits"], 192);
    assert_eq!(recs[0]["version"], env!("CARGO_PKG_VERSION"));
    assert!(recs.len() > 2);
    for r in &recs[1..] {
        let (n, rr, m) = (r["n"].to_string(), r["r"].to_string(), r["m"].to_string());
        let one = single(&["coeff", "-k", "4", "-c", "1:1", &n, &rr, &m]);
        assert_eq!(&one, r);
    }
}

#[test]
fn bound_zero_is_the_constant_term() {
    let recs = records(&eis(&["expand", "-k", "4", "-c", "1:1", "-b", "0"]));
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1]["value"], "1");
}

#[test]
fn expansion_is_deterministic_across_thread_counts() {
    let args = ["expand", "-k", "5", "-c", "3:2", "-b", "12", "--precision", "96"];
    let one = eis(&[&["--threads", "1"][..], &args[..]].concat());
    let four = eis(&[&["--threads", "4"][..], &args[..]].concat());
    let again = eis(&[&["--threads", "4"][..], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn csv_has_the_same_columns() {
    let out = eis(&["--format", "csv", "expand", "-k", "4", "-c", "1:1", "-b", "1"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next(), Some("n,r,m,value,mode,notes"));
    assert_eq!(lines.next(), Some("0,0,0,1,exact,constant term"));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_eis"))
        .args(["expand", "-k", "4", "-c", "1:1", "-b", "0"])
        .env("EIS_PRECISION_BITS", "80")
        .output()
        .unwrap();
    assert_eq!(records(&out)[0]["precision_bits"], 80);
}

#[test]
fn exit_codes() {
    let two = eis(&["expand", "-k", "4", "-c", "2:1", "-b", "2"]);
    assert_eq!(two.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&two.stderr).contains("no primitive character of conductor 2"));
    let parity = eis(&["coeff", "-k", "4", "-c", "3:2", "1", "0", "9"]);
    assert_eq!(parity.status.code(), Some(2));
    let forbid = eis(&["coeff", "-k", "5", "-c", "5:2", "--oracle", "forbid", "1", "5", "25"]);
    assert_eq!(forbid.status.code(), Some(3));
    let shallow = eis(&["local", "volume", "-p", "3", "-i", "4", "-j", "2", "-T", "1,0,1", "--depth", "2"]);
    assert_eq!(shallow.status.code(), Some(4));
}

#[test]
fn oracle_policy_allow_reaches_non_quadratic_places() {
    let r = single(&["coeff", "-k", "5", "-c", "5:2", "1", "5", "25"]);
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n == "K at p=5: oracle"));
}

#[test]
fn local_examples() {
    let k = single(&["local", "K", "-p", "3", "--np", "1", "--chi", "quad", "-T", "1,0,9", "-s", "4"]);
    assert_eq!(k["value"], k["oracle"]);
    assert_eq!(k["agrees"], true);
    let v = single(&["local", "volume", "-p", "3", "-i", "0", "-j", "0", "-T", "1,0,1"]);
    assert_eq!((v["value"].as_str(), v["oracle"].as_str()), (Some("2/3"), Some("2/3")));
    let u = single(&["local", "unramified", "-p", "5", "-e", "0", "-f", "0", "-L", "1", "-s", "4", "--chip", "1"]);
    assert_eq!(u["value"], "78624/78125");
    let u = single(&["local", "unramified", "-p", "3", "-e", "0", "-f", "1", "-L", "0", "-s", "4", "-T", "1,1,7"]);
    assert_eq!(u["agrees"], true);
    let ram = single(&["local", "ramified", "-p", "3", "-T", "1,3,9", "-s", "4", "--chip", "-1", "--oracle-lw", "3"]);
    assert_eq!(ram["agrees"], true);
    assert_eq!(single(&["local", "ap", "-p", "3", "-D", "1"])["value"], 0);
}

#[test]
fn verify_suites() {
    for suite in ["volumes", "bootstrap-oracle"] {
        let out = eis(&["verify", suite]);
        assert!(out.status.success(), "{suite}");
        let r = &records(&out)[0];
        assert_eq!(r["passed"], true);
        assert_eq!(r["suite"], suite);
    }
    let err = String::from_utf8(eis(&["verify", "bootstrap-oracle"]).stderr).unwrap();
    assert!(err.contains("seed: 20240601"));
}
