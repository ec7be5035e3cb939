//! Shared helpers for the CLI golden tests and the acceptance runner.
//!
//! Goldens live in `tests/golden`. Set `COHPURE_BLESS=1` to rewrite them from
//! the current binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

/// Absolute tolerance for numbers in golden comparisons.
pub const GOLDEN_TOL: f64 = 1e-9;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cohpure")
}

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn blessing() -> bool {
    std::env::var_os("COHPURE_BLESS").is_some()
}

/// Keys whose values depend on the invocation rather than the computation.
const VOLATILE_KEYS: [&str; 1] = ["out"];

/// Structural JSON comparison with numeric tolerance. Returns the first
/// mismatch as a path and description.
pub fn json_diff(expected: &Value, actual: &Value, path: &str) -> Option<String> {
    match (expected, actual) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            ((a - b).abs() > GOLDEN_TOL).then(|| format!("{path}: expected {a}, got {b}"))
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Some(format!("{path}: expected {} elements, got {}", a.len(), b.len()));
            }
            a.iter().zip(b).enumerate().find_map(|(i, (x, y))| json_diff(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(b)) => {
            let mut ka: Vec<_> = a.keys().collect();
            let mut kb: Vec<_> = b.keys().collect();
            ka.sort();
            kb.sort();
            if ka != kb {
                return Some(format!("{path}: expected keys {ka:?}, got {kb:?}"));
            }
            a.iter()
                .filter(|(k, _)| !VOLATILE_KEYS.contains(&k.as_str()))
                .find_map(|(k, x)| json_diff(x, &b[k], &format!("{path}.{k}")))
        }
        _ => (expected != actual).then(|| format!("{path}: expected {expected}, got {actual}")),
    }
}

/// Compares JSON text with the named golden file.
pub fn check_json(name: &str, actual: &str) -> Result<(), String> {
    let actual: Value = serde_json::from_str(actual).map_err(|e| format!("{name}: output is not JSON: {e}"))?;
    let path = golden_path(name);
    if blessing() {
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return Ok(());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
    let expected: Value = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
    json_diff(&expected, &actual, name).map_or(Ok(()), Err)
}

/// Compares CSV text with the named golden file, numeric fields with tolerance.
pub fn check_csv(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_path(name);
    if blessing() {
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
    let (el, al): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    if el.len() != al.len() {
        return Err(format!("{name}: expected {} lines, got {}", el.len(), al.len()));
    }
    for (i, (e, a)) in el.iter().zip(&al).enumerate() {
        let (ef, af): (Vec<&str>, Vec<&str>) = (e.split(',').collect(), a.split(',').collect());
        if ef.len() != af.len() {
            return Err(format!("{name}:{}: field count differs", i + 1));
        }
        for (x, y) in ef.iter().zip(&af) {
            let same = x == y
                || match (x.parse::<f64>(), y.parse::<f64>()) {
                    (Ok(x), Ok(y)) => (x - y).abs() <= GOLDEN_TOL,
                    _ => false,
                };
            if !same {
                return Err(format!("{name}:{}: expected '{e}', got '{a}'", i + 1));
            }
        }
    }
    Ok(())
}

/// A command whose stdout (and optionally an output file) is pinned.
pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub code: i32,
    /// Golden name for a file written through `--out`, if any.
    pub out_golden: Option<&'static str>,
}

fn case(name: &'static str, code: i32, args: &[&str]) -> Case {
    Case { name, args: args.iter().map(|s| s.to_string()).collect(), code, out_golden: None }
}

fn with_out(mut c: Case, golden: &'static str) -> Case {
    c.out_golden = Some(golden);
    c
}

/// Every command on the worked examples.
pub fn cases() -> Vec<Case> {
    let f = fixture;
    vec![
        case("quantify_mixed_qubit.json", 0, &["quantify", "--state", &f("mixed_qubit.json")]),
        case("quantify_plus.json", 0, &["quantify", "--state", &f("plus.json")]),
        case("quantify_diag.json", 0, &["quantify", "--state", &f("diag_09_01.json")]),
        case("quantify_diag.csv", 0, &["quantify", "--state", &f("diag_09_01.json"), "--format", "csv"]),
        with_out(case("mcms_uniform.json", 0, &["mcms", "--spectrum", "0.5,0.5", "--dim", "2"]), "mcms_uniform_state.json"),
        with_out(case("mcms_pure4.json", 0, &["mcms", "--spectrum", "1", "--dim", "4"]), "mcms_pure4_state.json"),
        case("mcms_09_01.json", 0, &["mcms", "--spectrum", "0.9,0.1", "--dim", "2"]),
        case("convert_pure_to_mixed.json", 0, &["convert", "--from", &f("plus.json"), "--to", &f("mixed_qubit.json")]),
        case("convert_mixed_to_pure.json", 0, &["convert", "--from", &f("mixed_qubit.json"), "--to", &f("plus.json")]),
        case("distill_pure8.json", 0, &["distill", "--state", &f("pure8.json")]),
        case("cost_diag.json", 0, &["cost", "--state", &f("diag_09_01.json")]),
        case("hierarchy_bell.json", 0, &["hierarchy", "--state", &f("bell.json"), "--seed", "1"]),
        case("hierarchy_mixed.json", 0, &["hierarchy", "--state", &f("mixed_two_qubit.json"), "--seed", "1"]),
        case(
            "hierarchy_bell_trace.json",
            0,
            &["hierarchy", "--state", &f("bell.json"), "--seed", "1", "--distance", "trace_norm", "--restarts", "4", "--refine", "2"],
        ),
        case("verify_theorem2.json", 0, &["verify", "--suite", "theorem2", "--seed", "1", "--trials", "50"]),
        case("verify_axioms.json", 0, &["verify", "--suite", "axioms", "--seed", "1", "--trials", "20"]),
        case("verify_appendix_g.json", 0, &["verify", "--suite", "appendixG", "--seed", "1", "--trials", "20"]),
        case("verify_majorization.json", 0, &["verify", "--suite", "majorization", "--seed", "1", "--trials", "20"]),
        case("verify_theorem1.json", 0, &["verify", "--suite", "theorem1", "--seed", "1", "--trials", "10"]),
        with_out(case("bloch_p_trace.json", 0, &["bloch", "--grid", "5", "--quantifier", "p_trace_norm"]), "bloch_p_trace.csv"),
        with_out(case("bloch_c_trace.json", 0, &["bloch", "--grid", "5", "--quantifier", "c_trace_norm"]), "bloch_c_trace.csv"),
        with_out(case("random_rank1.json", 0, &["random", "--dim", "3", "--rank", "1", "--seed", "7"]), "random_rank1_state.json"),
        with_out(case("random_full.json", 0, &["random", "--dim", "4", "--rank", "4", "--seed", "7"]), "random_full_state.json"),
    ]
}

/// Runs one case in a scratch directory and compares it with its goldens.
pub fn run_case(c: &Case) -> Result<(), String> {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out");
    let mut args: Vec<String> = c.args.clone();
    if c.out_golden.is_some() {
        args.push("--out".into());
        args.push(out_path.to_string_lossy().into_owned());
    }
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run(&refs);
    if out.code != c.code {
        return Err(format!("{}: exit {} (expected {}), stderr: {}", c.name, out.code, c.code, out.stderr));
    }
    if c.name.ends_with(".csv") {
        check_csv(c.name, &out.stdout)?;
    } else {
        check_json(c.name, &out.stdout)?;
    }
    if let Some(g) = c.out_golden {
        let written = std::fs::read_to_string(&out_path).map_err(|e| format!("{}: {e}", c.name))?;
        if g.ends_with(".csv") {
            check_csv(g, &written)?;
        } else {
            check_json(g, &written)?;
        }
    }
    Ok(())
}
