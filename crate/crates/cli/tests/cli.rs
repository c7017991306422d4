use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const INIT: &str = "mode == OFF && speed == 0 && !enable";

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("crates/core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainforge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn cruise(props: &str, extra: &[&str]) -> Output {
    let m = fixture("cruise.rsys");
    let p = fixture(props);
    let mut args = vec!["generate", m.to_str().unwrap(), p.to_str().unwrap(), "--init", INIT, "--final", INIT];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn cruise_text_report() {
    let o = cruise("cruise1.props", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("summary: tcs=1 len=9 "), "{out}");
    assert!(out.contains("status=minimal-certified"));
    // one line per step after the header, path and start lines
    let steps = out.lines().filter(|l| l.contains("  ->  ")).count();
    assert_eq!(steps, 9);
}

#[test]
fn json_is_deterministic_and_replays() {
    let a = cruise("cruise2.props", &["--format", "json", "--seed", "5"]);
    let b = cruise("cruise2.props", &["--format", "json", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["schema"], "chainforge-report/1");
    assert_eq!(json["summary"]["chains"], 1);
    let steps = json["chains"][0]["steps"].as_array().unwrap().len();
    assert_eq!(json["summary"]["total_length"], steps);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let r = cruise("cruise2.props", &["--replay", path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert!(stdout(&r).contains("replay: ok"));

    // a tampered input no longer reproduces the recorded trace
    let mut bad = json.clone();
    let input = bad["chains"][0]["steps"][0]["input"].as_object_mut().unwrap();
    for v in input.values_mut() {
        *v = serde_json::Value::Bool(!v.as_bool().unwrap());
    }
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let r = cruise("cruise2.props", &["--replay", path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("replay:"), "{}", stderr(&r));
}

#[test]
fn replay_reports_missing_property() {
    let a = cruise("cruise1.props", &["--format", "json"]);
    let mut json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    json["chains"][0]["properties"] = serde_json::json!(["p1", "p2", "p3"]);
    json["chains"][0]["covers"].as_object_mut().unwrap().remove("p4");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let r = cruise("cruise1.props", &["--replay", path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("no chain covers p4"), "{}", stderr(&r));
}

#[test]
fn unsatisfiable_final_set_exits_two() {
    let o = cruise("cruise1.props", &[]);
    assert_eq!(o.status.code(), Some(0));
    let m = fixture("cruise.rsys");
    let p = fixture("cruise1.props");
    let o = run(&["generate", m.to_str().unwrap(), p.to_str().unwrap(), "--final", "mode == ON && !enable"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("final state set is empty"));
}

#[test]
fn unreachable_property_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let props = dir.path().join("p.props");
    std::fs::write(&props, "property stuck { assume mode == ON && speed == 2; assert next(mode) == ON; }\n").unwrap();
    let m = fixture("cruise.rsys");
    let o = run(&["generate", m.to_str().unwrap(), props.to_str().unwrap(), "--k-max", "6", "--no-multi"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn parse_errors_exit_three_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let props = dir.path().join("bad.props");
    std::fs::write(&props, "property p { assume mode == FAST; assert true; }\n").unwrap();
    let m = fixture("cruise.rsys");
    let o = run(&["generate", m.to_str().unwrap(), props.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("bad.props:1:"), "{err}");

    let o = run(&["generate", m.to_str().unwrap(), fixture("cruise1.props").to_str().unwrap(), "--init", "mode =="]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["generate", "/nonexistent.rsys", "x.props"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invalid_timeout_is_rejected() {
    let o = cruise("cruise1.props", &["--timeout", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tiny_timeout_exits_four() {
    let o = cruise("cruise2.props", &["--timeout", "0.0001"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn dot_output_matches_golden() {
    let o = cruise("cruise1.props", &["--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/cruise.dot");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &o.stdout).unwrap();
    }
    assert_eq!(stdout(&o), std::fs::read_to_string(&golden).unwrap());
}

#[test]
fn graph_at_bound_two_has_eleven_edges() {
    let m = fixture("cruise.rsys");
    let p = fixture("cruise1.props");
    let o = run(&["graph", m.to_str().unwrap(), p.to_str().unwrap(), "--k", "2", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 11, "{out}");
    assert!(out.lines().all(|l| l.ends_with(": 1") || l.ends_with(": 2")), "{out}");
}

#[test]
fn shipped_bench_suite_meets_expectations() {
    let o = run(&["bench", root().join("bench").to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    let row = out.lines().find(|l| l.starts_with("cruise1 ")).expect("cruise1 row");
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&cols[1..3], ["1", "9"]);
    assert!(out.lines().any(|l| l.starts_with("cruise2 ")));
}

#[test]
fn empty_suite_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn violated_expectation_is_flagged_and_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let src = root().join("bench/cruise1");
    for (name, len) in [("a_wrong", 8), ("b_right", 9)] {
        let d = dir.path().join(name);
        std::fs::create_dir(&d).unwrap();
        for f in ["model.rsys", "props.props"] {
            std::fs::copy(src.join(f), d.join(f)).unwrap();
        }
        std::fs::write(d.join("expected.toml"), format!("init = \"{INIT}\"\n[expect]\ntcs = 1\nlen = {len}\n"))
            .unwrap();
    }
    let broken = dir.path().join("c_broken");
    std::fs::create_dir(&broken).unwrap();
    std::fs::write(broken.join("expected.toml"), "k_max = \"many\"\n").unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("a_wrong") && l.contains("FAIL: len 9, expected 8")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("b_right") && l.ends_with("ok")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("c_broken") && l.contains("FAIL")), "{out}");
}

#[test]
fn sat_subcommand_follows_dimacs_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = run(&["sat", sat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    let out = stdout(&o);
    assert!(out.starts_with("s SATISFIABLE"));
    assert!(out.contains("v -1 2 0"), "{out}");
    let unsat = dir.path().join("unsat.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = run(&["sat", unsat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "s UNSATISFIABLE\n");
}

#[test]
fn external_backend_gives_the_same_chain() {
    let m = fixture("cruise.rsys");
    let p = fixture("cruise1.props");
    let spec = format!("external:{} sat", env!("CARGO_BIN_EXE_chainforge"));
    let o = Command::new(env!("CARGO_BIN_EXE_chainforge"))
        .args(["generate", m.to_str().unwrap(), p.to_str().unwrap(), "--init", INIT])
        .env("CHAINFORGE_SOLVER", spec)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("summary: tcs=1 len=9 "));
}
