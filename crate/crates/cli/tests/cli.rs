use std::io::Write;
use std::process::{Command as Proc, Stdio};

use ultradyn::dynamics::Verdict;
use ultradyn_cli::{render, run, Body, CliError, Command, Format, Overrides, ProblemFile, Report, REPORT_SCHEMA};

const DIAG: &str = r#"{"prime": 2, "matrix": [["2","0","0"],["0","1","0"],["0","0","1/2"]]}"#;

const BENCHMARK: &str = r#"{
  "schema": "ultradyn.problem/1",
  "prime": 2,
  "map": [
    [{"exponents": [1, 0], "coeff": "2"}],
    [{"exponents": [0, 1], "coeff": "1/2"}, {"exponents": [2, 0], "coeff": "1"}]
  ],
  "a": ["1"],
  "order": 4,
  "mode": "stable",
  "horizon": 12,
  "points": [["1", "2/7"], ["0", "1"]]
}"#;

const ALL: [Command; 8] = [
    Command::Spectrum,
    Command::Split,
    Command::Hyperbolic,
    Command::Norm,
    Command::Classify,
    Command::Graph,
    Command::Orbit,
    Command::Member,
];

fn report(cmd: Command, text: &str, over: &Overrides) -> Report {
    run(cmd, &ProblemFile::from_json(text).unwrap(), over).unwrap()
}

fn binary(args: &[&str], stdin: &str) -> (String, String, i32) {
    let mut child = Proc::new(env!("CARGO_BIN_EXE_ultradyn"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn spectrum_of_a_diagonal_matrix() {
    let r = report(Command::Spectrum, DIAG, &Overrides::default());
    assert_eq!(r.schema, REPORT_SCHEMA);
    let Body::Spectrum(s) = r.result else { panic!("wrong body") };
    let vs: Vec<String> = s.entries.iter().map(|e| e.valuation.to_string()).collect();
    assert_eq!(vs, ["1", "0", "-1"]);
    assert!(s.entries.iter().all(|e| e.multiplicity == 1));
    let v: serde_json::Value = serde_json::from_str(&report(Command::Spectrum, DIAG, &Overrides::default()).to_json()).unwrap();
    assert_eq!(v["result"]["spectrum"]["entries"][0], serde_json::json!({"v": "1", "m": 1}));
}

#[test]
fn hyperbolicity_with_witness() {
    let over = Overrides { a: vec!["1".into(), "3".into()], ..Overrides::default() };
    let Body::Hyperbolic(rows) = report(Command::Hyperbolic, DIAG, &over).result else { panic!("wrong body") };
    assert!(!rows[0].hyperbolic);
    let w = rows[0].witness.as_ref().unwrap();
    assert_eq!(w.vector, ["0", "1", "0"]);
    assert!(w.constant);
    assert!(rows[1].hyperbolic && rows[1].witness.is_none());
}

#[test]
fn stable_graph_of_the_benchmark() {
    let Body::Graph(g) = report(Command::Graph, BENCHMARK, &Overrides::default()).result else { panic!("wrong body") };
    assert_eq!(g.graph.coefficients.len(), 1);
    assert_eq!(g.graph.coefficients[0].multi_index, [2]);
    assert_eq!(g.graph.coefficients[0].vector, ["2/7"]);
    assert_eq!(g.residual_degree, None);
    assert!(g.exactly_invariant);
}

#[test]
fn membership_and_orbits() {
    let Body::Member(rows) = report(Command::Member, BENCHMARK, &Overrides::default()).result else { panic!() };
    assert_eq!(rows[0].verdict, Verdict::CertifiedMember);
    assert_eq!(rows[1].verdict, Verdict::CertifiedNonMember);
    let over = Overrides { horizon: Some(2), ..Overrides::default() };
    let Body::Orbit(rows) = report(Command::Orbit, BENCHMARK, &over).result else { panic!() };
    assert_eq!(rows[0].iterates[2].point, ["4", "32/7"]);
    assert_eq!(rows[1].iterates[2].norm_valuation.to_string(), "-2");
}

#[test]
fn every_report_round_trips() {
    for cmd in ALL {
        let text = if matches!(cmd, Command::Spectrum | Command::Split | Command::Hyperbolic | Command::Norm) {
            DIAG
        } else {
            BENCHMARK
        };
        let r = report(cmd, text, &Overrides::default());
        let json = r.to_json();
        let back = Report::from_json(&json).unwrap_or_else(|e| panic!("{cmd:?}: {e}"));
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
    }
}

#[test]
fn output_is_deterministic() {
    for cmd in ALL {
        let name = format!("{cmd:?}").to_lowercase();
        let first = binary(&[&name], BENCHMARK);
        let second = binary(&[&name], BENCHMARK);
        assert_eq!(first.2, 0, "{name}: {}", first.1);
        assert_eq!(first.0, second.0);
        let r = report(cmd, BENCHMARK, &Overrides::default());
        assert_eq!(first.0, render(&r, Format::Json));
    }
}

#[test]
fn flags_override_the_file() {
    let (out, _, code) = binary(&["hyperbolic", "--a", "1/2,3", "--format", "table"], DIAG);
    assert_eq!(code, 0);
    assert!(out.contains("a = 1/2  hyperbolic = false  witness = (1, 0, 0)"));
    assert!(out.contains("a = 3  hyperbolic = true"));
    let (out, _, _) = binary(&["spectrum", "--prime", "3"], DIAG);
    let r = Report::from_json(&out).unwrap();
    assert_eq!(r.prime, 3);
}

#[test]
fn exit_codes() {
    let (_, err, code) = binary(&["spectrum"], r#"{"prime": 2, "matrix": [["1"]], "extra": 0}"#);
    assert_eq!(code, 1, "{err}");
    let (_, _, code) = binary(&["spectrum"], r#"{"prime": 6, "matrix": [["1"]]}"#);
    assert_eq!(code, 1);
    let (_, _, code) = binary(&["spectrum"], r#"{"prime": 2, "matrix": [["1", "x"]]}"#);
    assert_eq!(code, 1);
    let (_, _, code) = binary(&["bogus"], DIAG);
    assert_eq!(code, 1);
    // a = 1/2 lies on the spectrum of the benchmark jacobian
    let (_, err, code) = binary(&["graph", "--mode", "unstable", "--a", "1/2"], BENCHMARK);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("precondition"));
    let not_fixed = r#"{"prime": 2, "map": [[{"exponents": [2], "coeff": "1"}]], "fixed_point": ["2"]}"#;
    assert_eq!(binary(&["classify"], not_fixed).2, 2);
    assert_eq!(CliError::from(ultradyn::Error::PrecisionExhausted("x".into())).exit_code(), 3);
    assert_eq!(CliError::from(ultradyn::Error::RankUncertified("x".into())).exit_code(), 3);
}
