use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn hamfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamfactor"))
        .args(args)
        .env_remove("HAMFACTOR_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

/// Rational matrix from its `{rows, cols, data}` encoding, as strings.
fn cells(m: &Value) -> Vec<Vec<String>> {
    m["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .collect()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

fn nonzero_positions(v: &[String]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| *x != "0").map(|(i, _)| i + 1).collect()
}

#[test]
fn solve_d_double_j2_with_oracle() {
    let s = spec("double_j2.json");
    let r = json(&hamfactor(&["solve-d", path_str(&s), "--oracle"]));
    assert_eq!(r["version"], 1);
    assert_eq!(r["family"]["dim"], 4);
    assert_eq!(r["oracle"]["oracle_dim"], 4);
    assert_eq!(r["oracle"]["agrees"], true);
}

#[test]
fn solve_d_single_two_block() {
    let s = spec("zero2.json");
    let r = json(&hamfactor(&["solve-d", path_str(&s), "--oracle"]));
    // symmetric D with DB skew for B = J_2(0) leaves only d_2_2
    assert_eq!(r["family"]["dim"], 1);
    assert_eq!(r["oracle"]["agrees"], true);
    let basis = &r["family"]["basis"][0][1];
    let m = cells(basis);
    assert_eq!(m[0][0], "0");
    assert_eq!(m[1][0], "0");
}

#[test]
fn exit_codes() {
    let empty = hamfactor(&["solve-d", path_str(&spec("empty.json"))]);
    assert_eq!(code(&empty), 3);

    let bad = hamfactor(&["solve-d", path_str(&spec("bad_syntax.json"))]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("line 4, column"), "{}", stderr(&bad));

    let unknown = hamfactor(&["classify", path_str(&spec("double_j2.json")), "--assign", "d99=1"]);
    assert_eq!(code(&unknown), 4);
    assert!(stderr(&unknown).contains("g1.d_1_4"));

    let bad_value = hamfactor(&["classify", path_str(&spec("double_j2.json")), "--assign", "d14=one"]);
    assert_eq!(code(&bad_value), 4);

    assert_eq!(code(&hamfactor(&["no-such-command"])), 4);
    assert_eq!(code(&hamfactor(&["solve-d", path_str(&spec("double_j2.json")), "--format", "yaml"])), 4);
    assert_eq!(code(&hamfactor(&["solve-d", "/nonexistent/spec.json"])), 4);
    assert_eq!(code(&hamfactor(&["--help"])), 0);
}

#[test]
fn invalid_values_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("neg.json");
    std::fs::write(&p, r#"{"version":1,"blocks":[{"kind":"real_pair","lambda":"-1","sizes_plus":[1]}]}"#).unwrap();
    let out = hamfactor(&["solve-d", path_str(&p)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("lambda"));
}

#[test]
fn dimension_cap() {
    let s = spec("double_j2.json");
    let capped = Command::new(env!("CARGO_BIN_EXE_hamfactor"))
        .args(["solve-d", path_str(&s)])
        .env("HAMFACTOR_MAX_DIM", "3")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 3);
    assert!(stderr(&capped).contains("exceeds the limit 3"));
    let garbage = Command::new(env!("CARGO_BIN_EXE_hamfactor"))
        .args(["solve-d", path_str(&s)])
        .env("HAMFACTOR_MAX_DIM", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&garbage), 4);
}

#[test]
fn classify_poisson_with_casimirs() {
    let s = spec("double_j2.json");
    let r = json(&hamfactor(&["classify", path_str(&s), "--assign", "d14=1"]));
    let c = &r["classification"];
    assert_eq!(c["structure"]["verdict"], "poisson");
    let pi = cells(&c["structure"]["pi"]);
    assert_eq!(pi[0][2], "-1");
    assert_eq!(pi[2][0], "1");
    let mut supports: Vec<usize> = c["conserved"]["casimirs"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|k| nonzero_positions(&strings(&k["c"])))
        .collect();
    supports.sort();
    assert_eq!(supports, vec![2, 4]);
}

#[test]
fn casimirs_is_classify() {
    let s = spec("double_j2.json");
    let a = hamfactor(&["classify", path_str(&s), "--assign", "d14=1", "--assign", "d22=3/2"]);
    let b = hamfactor(&["casimirs", path_str(&s), "--assign", "d14=1", "--assign", "d22=3/2"]);
    assert_eq!(json(&a), json(&b));
}

#[test]
fn classify_presymplectic_with_isotropic_fields() {
    let s = spec("not_symplectic.json");
    let r = json(&hamfactor(&["classify", path_str(&s), "--assign", "d14=1"]));
    let c = &r["classification"];
    assert_eq!(c["structure"]["verdict"], "presymplectic");
    let fields: Vec<Vec<String>> =
        c["conserved"]["isotropic_fields"].as_array().unwrap().iter().map(|f| strings(&f["field"])).collect();
    assert_eq!(fields.len(), 2);
    assert!(fields.contains(&vec!["0".into(), "0".into(), "-1".into(), "0".into()]));
}

#[test]
fn classify_without_assignments_is_trivial() {
    for name in ["double_j2.json", "mixed.json", "pair11.json"] {
        let r = json(&hamfactor(&["classify", path_str(&spec(name))]));
        assert_eq!(r["classification"]["structure"]["verdict"], "trivial", "{name}");
    }
}

fn integrable(name: &str) -> Value {
    json(&hamfactor(&["integrable", path_str(&spec(name))]))["integrable"].clone()
}

fn counts(sys: &Value) -> (u64, u64) {
    (sys["p"].as_u64().unwrap(), sys["q"].as_u64().unwrap())
}

#[test]
fn integrable_examples() {
    let z2 = integrable("zero2.json");
    assert_eq!(counts(&z2), (1, 1));
    assert_eq!(z2["structure"]["verdict"], "proper_big_isotropic");

    let z22 = integrable("double_j2.json");
    assert_eq!(counts(&z22), (1, 3));
    assert_eq!(z22["structure"]["verdict"], "poisson");

    let pair = integrable("pair11.json");
    assert_eq!(counts(&pair), (1, 1));
    assert_eq!(pair["structure"]["verdict"], "symplectic");

    let mixed = integrable("mixed.json");
    let (p, q) = counts(&mixed);
    assert_eq!(p + q, mixed["dim"].as_u64().unwrap());
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("report.json");
    let out = hamfactor(&["integrable", path_str(&spec("mixed.json")), "--out", path_str(&saved)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let again = json(&hamfactor(&["verify", path_str(&saved)]));
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(again, original);

    // break commutation: shift the top-right entry of the last field
    let mut tampered = original.clone();
    let fields = tampered["integrable"]["vector_fields"].as_array_mut().unwrap();
    let last = fields.last_mut().unwrap();
    let dim = last["rows"].as_u64().unwrap() as usize;
    let (i, j) = (0, dim - 1);
    let old: i64 = last["data"][i][j].as_str().unwrap().parse().unwrap_or(0);
    last["data"][i][j] = Value::String((old + 7).to_string());
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    let out = hamfactor(&["verify", path_str(&bad)]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
    assert!(stderr(&out).contains("commutation"), "{}", stderr(&out));

    let no_system = dir.path().join("family.json");
    let family = hamfactor(&["solve-d", path_str(&spec("double_j2.json")), "--out", path_str(&no_system)]);
    assert_eq!(code(&family), 0);
    assert_eq!(code(&hamfactor(&["verify", path_str(&no_system)])), 3);

    let mut future = original;
    future["version"] = Value::from(99);
    let later = dir.path().join("future.json");
    std::fs::write(&later, serde_json::to_string(&future).unwrap()).unwrap();
    assert_eq!(code(&hamfactor(&["verify", path_str(&later)])), 3);

    std::fs::write(&later, "{ not json").unwrap();
    assert_eq!(code(&hamfactor(&["verify", path_str(&later)])), 2);
}

fn collect_rationals(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) if !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == '-' || c == '/') => {
            out.push(s.clone())
        }
        Value::Array(items) => items.iter().for_each(|x| collect_rationals(x, out)),
        Value::Object(map) => map.values().for_each(|x| collect_rationals(x, out)),
        _ => {}
    }
}

#[test]
fn report_json_and_text_agree() {
    let s = spec("double_j2.json");
    let args = ["report", path_str(&s), "--assign", "d14=1", "--assign", "d24=-2/3"];
    let r = json(&hamfactor(&args));
    for key in ["family", "oracle", "classification", "invertible_choice", "commutant", "integrable"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let text_out = hamfactor(&[&args[..], &["--format", "text"]].concat());
    assert_eq!(code(&text_out), 0);
    let text = String::from_utf8(text_out.stdout).unwrap();
    let mut numbers = Vec::new();
    collect_rationals(&r, &mut numbers);
    assert!(numbers.contains(&"-2/3".to_string()));
    for n in numbers {
        assert!(text.contains(&n), "{n} missing from text");
    }
}

#[test]
fn seeded_output_is_deterministic() {
    let s = spec("mixed.json");
    let a = hamfactor(&["report", path_str(&s), "--seed", "17"]);
    let b = hamfactor(&["report", path_str(&s), "--seed", "17"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let f1 = hamfactor(&["demo-flow", path_str(&s), "--steps", "50", "--seed", "3"]);
    let f2 = hamfactor(&["demo-flow", path_str(&s), "--steps", "50", "--seed", "3"]);
    assert_eq!(f1.stdout, f2.stdout);
}

fn flow(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = hamfactor(args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn max_relative_drift(rows: &[Vec<f64>], col: usize) -> f64 {
    let x0 = rows[0][col];
    rows.iter().map(|r| (r[col] - x0).abs()).fold(0.0, f64::max) / x0.abs().max(1.0)
}

#[test]
fn demo_flow_conserves_h_and_casimirs() {
    let s = spec("double_j2.json");
    let (header, rows) = flow(&["demo-flow", path_str(&s), "--assign", "d14=1", "--steps", "1000"]);
    assert_eq!(header, ["t", "H", "casimir_1", "casimir_2"]);
    assert_eq!(rows.len(), 1001);
    assert!((rows[1000][0] - 10.0).abs() < 1e-12);
    for col in 1..header.len() {
        assert!(max_relative_drift(&rows, col) <= 1e-9, "column {col}");
    }
}

#[test]
fn demo_flow_harmonic_oscillator() {
    let s = spec("harmonic.json");
    let (_, rows) = flow(&["demo-flow", path_str(&s), "--assign", "alpha11=1"]);
    assert_eq!(rows.len(), 10_001);
    assert!(max_relative_drift(&rows, 1) <= 1e-9);
}

#[test]
fn demo_flow_zero_dynamics_is_constant() {
    let s = spec("zero_b.json");
    let (header, rows) = flow(&["demo-flow", path_str(&s), "--assign", "d11=1", "--assign", "d33=2", "--steps", "200"]);
    assert!(header.len() > 2);
    for r in &rows {
        assert_eq!(r[1..], rows[0][1..]);
    }
}

#[test]
fn demo_flow_rejects_bad_steps() {
    let s = spec("harmonic.json");
    assert_eq!(code(&hamfactor(&["demo-flow", path_str(&s), "--steps", "0"])), 4);
    assert_eq!(code(&hamfactor(&["demo-flow", path_str(&s), "--t-max", "-1"])), 4);
}

#[test]
fn commutant_with_oracle() {
    let s = spec("mixed.json");
    let r = json(&hamfactor(&["commutant", path_str(&s), "--oracle"]));
    assert_eq!(r["commutant_oracle"]["agrees"], true);
    let single = json(&hamfactor(&["commutant", path_str(&spec("zero2.json"))]));
    assert_eq!(single["commutant"]["dim"], 2);
}
