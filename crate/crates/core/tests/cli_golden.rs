//! Each `tests/golden/NAME.cmd` holds one command line; `NAME.out` is its expected
//! standard output. `{dir}` in a command stands for the golden directory.
//! Run with `REGUDIST_BLESS=1` to rewrite the expected files.
//!
//! Numeric tokens compare to 1e-6 relative or 1e-8 absolute, so that integrator
//! round-off near the noise floor does not break the comparison.

use std::path::{Path, PathBuf};

use regudist::cli::run;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_line(line: &str, dir: &Path) -> (i32, String, String) {
    let line = line.replace("{dir}", dir.to_str().unwrap());
    let args = shlex::split(&line).unwrap_or_else(|| panic!("unbalanced quotes in '{line}'"));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("regudist".to_string()).chain(args), None, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn token_matches(a: &str, b: &str) -> bool {
    let num = |s: &str| s.trim_end_matches(',').parse::<f64>().ok();
    match (num(a), num(b)) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-8_f64.max(1e-6 * x.abs().max(y.abs())),
        _ => a == b,
    }
}

fn outputs_match(expected: &str, got: &str) -> bool {
    let (e, g): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), got.lines().collect());
    e.len() == g.len()
        && e.iter().zip(&g).all(|(a, b)| {
            let (ta, tb): (Vec<&str>, Vec<&str>) = (a.split_whitespace().collect(), b.split_whitespace().collect());
            ta.len() == tb.len() && ta.iter().zip(&tb).all(|(x, y)| token_matches(x, y))
        })
}

#[test]
fn golden_commands() {
    let dir = golden_dir();
    let bless = std::env::var_os("REGUDIST_BLESS").is_some();
    let mut cmds: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cmd"))
        .collect();
    cmds.sort();
    assert!(cmds.len() >= 10, "golden directory looks empty");
    let mut failures = Vec::new();
    for cmd in &cmds {
        let line = std::fs::read_to_string(cmd).unwrap();
        let (code, out, err) = run_line(line.trim(), &dir);
        let name = cmd.file_stem().unwrap().to_string_lossy().to_string();
        if code != 0 {
            failures.push(format!("{name}: exit {code}: {err}"));
            continue;
        }
        let expected_path = cmd.with_extension("out");
        if bless {
            std::fs::write(&expected_path, &out).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&expected_path).unwrap_or_default();
        if !outputs_match(&expected, &out) {
            failures.push(format!("{name}:\n--- expected\n{expected}--- got\n{out}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn json_output_is_sorted_and_pretty() {
    let text = std::fs::read_to_string(golden_dir().join("json_solve_p1.out")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(text.contains("\n  \""));
}

#[test]
fn comparison_tolerates_round_off_only() {
    assert!(outputs_match("1e-3\t0\t1.235e-9\n", "1e-3\t0\t1.3e-9\n"));
    assert!(!outputs_match("x = 3*theta(1)\n", "x = 2*theta(1)\n"));
    assert!(!outputs_match("1.5e-2\n", "1.6e-2\n"));
    assert!(!outputs_match("a\n", "a\nb\n"));
}
