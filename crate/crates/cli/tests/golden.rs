use std::path::{Path, PathBuf};

use hodge_neron_cli::commands::applicable;
use hodge_neron_cli::run_cli;
use hodge_neron_cli::scenario::load_scenario;

const SCENARIOS: [&str; 5] = ["example1", "example2", "example3", "example3-lambda1", "torsion"];

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn scenario(name: &str) -> PathBuf {
    root().join("scenarios").join(format!("{name}.json"))
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["hodge-neron"];
    full.extend_from_slice(args);
    let code = run_cli(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn check_golden(path: &Path, actual: &str) {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|_| panic!("missing golden file {}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "golden mismatch for {}", path.display());
}

#[test]
fn golden_reports() {
    for name in SCENARIOS {
        let path = scenario(name);
        let s = load_scenario(&path).unwrap();
        let mut cmds = applicable(&s);
        cmds.push("report-all");
        for c in cmds {
            let (code, out, err) = invoke(&[c, path.to_str().unwrap()]);
            assert!(err.is_empty() || code != 0, "{name} {c}: unexpected stderr {err}");
            check_golden(&root().join("golden").join(name).join(format!("{c}.txt")), &format!("{out}exit: {code}\n"));
        }
    }
}

#[test]
fn report_all_is_deterministic() {
    for name in ["example2", "example3"] {
        let p = scenario(name);
        let a = invoke(&["report-all", p.to_str().unwrap()]);
        let b = invoke(&["report-all", p.to_str().unwrap()]);
        assert_eq!(a, b);
        let ja = invoke(&["report-all", p.to_str().unwrap(), "--format", "json"]);
        let jb = invoke(&["report-all", p.to_str().unwrap(), "--format", "json"]);
        assert_eq!(ja, jb);
    }
}

#[test]
fn noncommuting_scenario_is_rejected() {
    let p = scenario("noncommuting");
    let (code, out, err) = invoke(&["validate", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("[commuting]"), "{err}");
}

#[test]
fn unknown_command_and_bad_flags() {
    let p = scenario("example2");
    assert_eq!(invoke(&["frobnicate", p.to_str().unwrap()]).0, 1);
    assert_eq!(invoke(&["fiber", p.to_str().unwrap(), "--point", "0,x"]).0, 1);
    assert_eq!(invoke(&["fiber", p.to_str().unwrap(), "--point", "0"]).0, 1);
    assert_eq!(invoke(&["monodromy", p.to_str().unwrap()]).0, 1);
    assert_eq!(invoke(&["nf-v0", p.to_str().unwrap()]).0, 1);
    assert_eq!(invoke(&["validate", "/nonexistent/scenario.json"]).0, 1);
}

#[test]
fn spec_examples_from_the_command_line() {
    let (code, out, _) = invoke(&["fiber", scenario("example2").to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(code, 0);
    assert!(out.contains("vector_dim: 3\n"));
    let (_, out, _) = invoke(&["fiber", scenario("example2").to_str().unwrap(), "--point", "1/2,1/3"]);
    assert!(out.contains("vector_dim: 2\n"));
    let (_, out, _) = invoke(&["nf-singularity", scenario("example3").to_str().unwrap()]);
    assert!(out.contains("class: nontorsion\n"));
    let (_, out, _) = invoke(&["monodromy", scenario("example1").to_str().unwrap()]);
    assert!(out.contains("order: 6\n") && out.contains("det(T-id): 1\n") && out.contains("fiber: ℂ\n"));
}

#[test]
fn json_output_and_out_file() {
    let dir = std::env::temp_dir().join(format!("hodge-neron-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("fiber.json");
    let (code, out, _) = invoke(&[
        "fiber",
        scenario("example2").to_str().unwrap(),
        "--stratum",
        "1",
        "--format",
        "json",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["vector_dim"], "2");
    assert_eq!(v["command"], "fiber");
    assert_eq!(std::fs::read_to_string(&file).unwrap(), out);
    std::fs::remove_dir_all(&dir).unwrap();
}
