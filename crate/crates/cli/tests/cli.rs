use std::process::{Command, Output};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::Value;
use subregular_symbolic::{Poly, QuadContext, QuadExt, Rat, RationalFunction};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subregular")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn bigints(v: &Value) -> Vec<BigInt> {
    v.as_array().unwrap().iter().map(|n| BigInt::from_str(&n.to_string()).unwrap()).collect()
}

fn rational(v: &Value) -> RationalFunction {
    RationalFunction::from_integer_pair(&bigints(&v["num"]), &bigints(&v["den"])).unwrap()
}

/// Rebuilds the generating function from its JSON form and expands it.
fn expand(gf: &Value, order: usize) -> Vec<BigInt> {
    let series = match gf["type"].as_str().unwrap() {
        "rational" => rational(gf).series_expand(order).unwrap(),
        "quadext" => {
            let mp: Vec<Poly> =
                gf["minpoly"].as_array().unwrap().iter().map(|p| Poly::from_bigints(&bigints(p))).collect();
            let seed = Rat::from_str(gf["seed"].as_str().unwrap()).unwrap();
            let a_loops = gf["a_loops"].as_u64().map(|a| a as u32);
            let ctx = QuadContext::new([mp[0].clone(), mp[1].clone(), mp[2].clone()], seed, a_loops).unwrap();
            QuadExt::new(rational(&gf["a"]), rational(&gf["b"]), Arc::new(ctx)).series_expand(order).unwrap()
        }
        other => panic!("unexpected gf type {other}"),
    };
    series.coeffs().iter().map(|c| c.to_integer()).collect()
}

#[test]
fn enumerate_counts() {
    let out = stdout(&["enumerate", "123", "--max-n", "4"]);
    let counts: Vec<&str> = out.lines().map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "2", "5", "14"]);
    let v = json(&["enumerate", "--patterns", "[3,1,2],[2,1,4,3]", "--max-n", "5", "--json"]);
    assert_eq!(v["counts"], serde_json::json!([1, 2, 5, 13, 34]));
}

#[test]
fn solve_json_schema() {
    let v = json(&["solve", "123,132", "--json"]);
    assert_eq!(v["gf"], serde_json::json!({ "type": "rational", "num": [0, 1], "den": [1, -2] }));
    assert_eq!(v["conjectural"], Value::Bool(false));
    assert_eq!(v["classification"]["family"], "AlmostPathDirected");
}

#[test]
fn json_round_trips() {
    for b in ["123,132", "123,43215", "123,312", "123"] {
        let v = json(&["solve", b, "--json", "--series-order", "20"]);
        let series = bigints(&v["series"]);
        assert_eq!(expand(&v["gf"], series.len() - 1), series, "{b}");
    }
    let v = json(&["solve", "123", "--json"]);
    assert_eq!(v["gf"]["type"], "quadext");
    assert_eq!(v["gf"]["a_loops"], 1);
}

#[test]
fn output_is_deterministic() {
    for args in [&["solve", "123,2143", "--json"][..], &["rules", "123,312"][..], &["solve", "123"][..]] {
        assert_eq!(stdout(args), stdout(args));
    }
}

#[test]
fn text_commands() {
    assert!(stdout(&["classify", "123,312"]).starts_with("AlmostPathDirected"));
    assert!(stdout(&["classify", "123,312"]).contains("W = {1,12}"));
    let rules = stdout(&["rules", "123,132"]);
    assert!(rules.contains("k(k-1)...1 ~> 12^k, (k+1)k...1  (k>=2)"), "{rules}");
    let solved = stdout(&["solve", "123,43215"]);
    assert!(solved.contains("G(x) = (x - 2*x^2)/(1 - 4*x + 3*x^2)"), "{solved}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "1"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "1223"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "123", "--max-n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "123", "--depth", "2", "--series-order", "8"]).status.code(), Some(0));
}
