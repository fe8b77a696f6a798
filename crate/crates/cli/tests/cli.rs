use std::process::Command;

use critforge_cli::run;
use serde_json::Value;

fn cli(args: &[&str]) -> critforge_cli::Output {
    run(std::iter::once("critforge").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = cli(&a);
    let v = serde_json::from_str(out.stdout.trim()).unwrap_or_else(|e| panic!("{e}: {:?}", out));
    (out.code, v)
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

const CORPUS: &[&[&str]] = &[
    &["milnor", "--vars", "x,y", "x^3 + y^4"],
    &["milnor", "--vars", "x,y", "x^2*y"],
    &["milnor", "--vars", "x", "2x"],
    &["tjurina", "--vars", "x,y", "x^4 + y^5 + x^2*y^3"],
    &["behrend", "--vars", "x,y", "x^3 + y^3"],
    &["split", "--vars", "x,y,z", "x^3 + y^2 + x*z + z^2"],
    &["minimal-model", "--preset", "e6-automorphism"],
    &["stabilize", "--vars", "x", "x^3", "--form", "0,1;1,0"],
    &["ts-sum", "--vars", "x", "x^3", "--vars", "x", "x^4"],
    &["invariants", "--vars", "x,y", "x^2 + y^5"],
    &["stable-compare", "--vars", "x", "x^3", "--vars", "x,y", "x^3 + y^2"],
    &["stable-compare", "--vars", "x", "x^3", "--vars", "x", "x^4"],
    &["verify-witness", "--preset", "a2-stabilized"],
    &["verify-isotopy", "-N", "8", "--preset", "e6-isotopy"],
    &["verify-isotopy", "--vars", "x", "x^2", "--map", "(1+t)*x"],
    &["det-family", "--preset", "hyperbolic-3cycle"],
    &["gw-class", "--form", "diag:1,-1,2"],
    &["gw-class", "--form", "0,1;2,0"],
    &["milnor", "-N", "1", "--vars", "x", "x^3"],
    &["milnor", "--preset", "nope"],
    &["no-such-command"],
];

#[test]
fn milnor_of_e6() {
    let (code, v) = json(&["milnor", "--vars", "x,y", "x^3 + y^4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["mu"], 6);
    let human = cli(&["milnor", "--vars", "x,y", "x^3 + y^4"]).stdout;
    assert!(human.contains("mu: 6"), "{human}");
}

#[test]
fn stabilized_cusp_is_consistent() {
    let out = cli(&["stable-compare", "--vars", "x", "x^3", "--vars", "x,y", "x^3 + y^2"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("CONSISTENT_TO_ORDER(12)"), "{}", out.stdout);
}

#[test]
fn three_cycle_determinant() {
    let (code, v) = json(&["det-family", "--preset", "hyperbolic-3cycle"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["det"], "1");
    assert_eq!(v["result"]["specializations"][1]["matrix"][2][0], "1");
    assert!(cli(&["det-family", "--preset", "hyperbolic-3cycle"]).stdout.contains("det = 1"));
}

#[test]
fn parse_error_reports_offset() {
    let (code, v) = json(&["milnor", "--vars", "x", "2x"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["code"], "parse_error");
    assert!(v["error"]["message"].as_str().unwrap().contains("offset 1"));
}

#[test]
fn non_isolated_is_inconclusive() {
    let (code, v) = json(&["milnor", "--vars", "x,y", "x^2*y"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "inconclusive");
    assert_eq!(v["result"]["checked_to"], 64);
}

#[test]
fn isotopy_preset_reaches_automorphism() {
    let (code, v) = json(&["verify-isotopy", "-N", "10", "--preset", "e6-isotopy"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["phi_1_matches_automorphism"], true);
}

#[test]
fn failed_checks_exit_zero_with_flag() {
    let (code, v) = json(&["verify-isotopy", "--vars", "x", "x^2", "--map", "(1+t)*x"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], false);
    assert_eq!(v["result"]["jacobian_unit"], false);
    let (code, v) = json(&["verify-witness", "--vars", "x", "x^3", "--vars", "x,y", "x^3 + y^2", "--q1", "diag:2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["valid"], false);
}

#[test]
fn bad_settings_are_usage_errors() {
    assert_eq!(cli(&["milnor", "-N", "1", "--vars", "x", "x^3"]).code, 1);
    assert_eq!(cli(&["milnor", "-N", "20", "--cap", "10", "--vars", "x", "x^3"]).code, 1);
    assert_eq!(cli(&["milnor", "--mode", "real", "--vars", "x", "x^3"]).code, 1);
    assert_eq!(cli(&[]).code, 1);
    assert_eq!(cli(&["gw-class", "--form", "1,2"]).code, 1);
}

#[test]
fn every_report_matches_schema() {
    let v = validator();
    for args in CORPUS {
        let (_, report) = json(args);
        let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}\n{report}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in CORPUS {
        let a = cli(args);
        let b = cli(args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn json_keys_are_sorted() {
    let out = cli(&["invariants", "--vars", "x,y", "x^2 + y^5", "--json"]).stdout;
    let cap = out.find("\"cap\"").unwrap();
    let status = out.find("\"status\"").unwrap();
    let result = out.find("\"result\"").unwrap();
    assert!(cap < result && result < status);
}

#[test]
fn batch_keeps_input_order() {
    let dir = std::env::temp_dir().join(format!("critforge-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("jobs.txt");
    let lines: Vec<String> = (2..10).map(|k| format!("milnor --vars x \"x^{k}\"")).collect();
    std::fs::write(&path, format!("# comment\n{}\n\nmilnor --vars x,y \"x^2*y\"\n", lines.join("\n"))).unwrap();
    let out = cli(&["--batch", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 2);
    let reports: Vec<Value> = out.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 9);
    for (k, r) in reports[..8].iter().enumerate() {
        assert_eq!(r["result"]["mu"], k + 1);
        assert_eq!(r["line"], k + 2);
    }
    assert_eq!(reports[8]["status"], "inconclusive");
    let v = validator();
    assert!(reports.iter().all(|r| v.is_valid(r)));
    let again = cli(&["--batch", path.to_str().unwrap(), "--json"]);
    assert_eq!(out, again);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_critforge");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["milnor", "--vars", "x,y", "x^3 + y^4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("mu: 6"));
    assert_eq!(status(&["milnor", "--vars", "x", "2x"]).status.code(), Some(1));
    assert_eq!(status(&["milnor", "--vars", "x,y", "x^2*y"]).status.code(), Some(2));
    let help = status(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("stable-compare"));
}
