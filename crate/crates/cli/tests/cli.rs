use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn tcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcc"))
        .args(args)
        .env_remove("TCC_BUDGET_SECONDS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report on stdout")
}

fn check_report_schema(r: &Value) {
    for key in ["suite", "p", "complete", "results", "verdict", "details"] {
        assert!(r.get(key).is_some(), "missing {}", key);
    }
    for e in r["results"].as_array().unwrap() {
        assert!(e["classes"].is_u64());
        assert!(e["ast"].is_boolean());
        assert!(e["aut_order"].is_u64());
        assert!(e["aut_matches"].is_string() || e["aut_matches"].is_null());
        assert!(e["schurian"].is_boolean());
    }
}

#[test]
fn orb_summaries() {
    assert_eq!(stdout(&tcc(&["orb", "--group", "agl1:5", "--arity", "3"])).trim(), "7 classes, AST: true");
    assert_eq!(stdout(&tcc(&["orb", "--group", "sym:5", "--arity", "2"])).trim(), "2 classes");
    assert_eq!(stdout(&tcc(&["orb", "--group", "cyclic:5", "--arity", "3"])).trim(), "25 classes, AST: false");
    assert_eq!(code(&tcc(&["orb", "--group", "agl1:6"])), 2);
}

#[test]
fn orb_output_round_trips_through_wl_close() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = tcc(&["orb", "--group", "cyclotomic:7:3", "--arity", "3", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = tcc(&["wl-close", "--input", a.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 refining rounds"));
    let (ja, jb) = (read_json(&a), read_json(&b));
    for key in ["n", "m", "colors", "classes"] {
        assert_eq!(ja[key], jb[key], "{}", key);
    }
}

#[test]
fn wl_close_of_pattern_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pattern.json");
    let mut colors = Vec::new();
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                colors.push(match (a == b, b == c, a == c) {
                    (true, true, _) => 0,
                    (true, false, _) => 1,
                    (false, true, _) => 2,
                    (false, false, true) => 3,
                    _ => 4,
                });
            }
        }
    }
    fs::write(&input, json!({"n": 5, "m": 3, "colors": colors}).to_string()).unwrap();
    let o = tcc(&["wl-close", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.starts_with("5 classes"), "{}", line);
    let alternations: usize = line
        .split("stable after ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap();
    assert!(alternations <= 2, "{}", line);
}

#[test]
fn malformed_input_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{\"n\": 5, \"m\": 3, \"colors\": [0, 1").unwrap();
    let o = tcc(&["wl-close", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    assert_eq!(code(&tcc(&["wl-close", "--input", "/nonexistent/x.json"])), 2);
    assert_eq!(code(&tcc(&["orb", "--group", "sym:5", "--bogus"])), 2);
}

#[test]
fn project_and_residue_use_one_based_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("agl.json");
    tcc(&["orb", "--group", "agl1:5", "--out", cfg.to_str().unwrap()]);
    let c = cfg.to_str().unwrap();
    assert_eq!(stdout(&tcc(&["project", "--input", c, "--coords", "1,2"])).trim(), "2 classes");
    assert_eq!(stdout(&tcc(&["project", "--input", c, "--coords", "3"])).trim(), "1 classes");
    assert_eq!(
        stdout(&tcc(&["residue", "--input", c, "--coords", "1,2", "--values", "0,1"])).trim(),
        "5 classes"
    );
    assert_eq!(code(&tcc(&["project", "--input", c, "--coords", "0"])), 2);
    assert_eq!(code(&tcc(&["project", "--input", c, "--coords", "4"])), 2);
}

#[test]
fn aut_and_schurian() {
    let o = tcc(&["aut", "--group", "agl1:5"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("order: 20"), "{}", out);
    assert!(out.contains("matches: agl1:5"), "{}", out);
    let o = tcc(&["schurian", "--group", "cyclic:5"]);
    assert_eq!(stdout(&o).trim(), "schurian: true, aut order 5");
}

#[test]
fn enumerate_agl_base() {
    let o = tcc(&["enumerate", "--base", "agl1:5"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    check_report_schema(&r);
    assert_eq!(r["complete"], json!(true));
    let orders: Vec<u64> = r["results"].as_array().unwrap().iter().map(|e| e["aut_order"].as_u64().unwrap()).collect();
    let mut sorted = orders.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![20, 120]);
}

#[test]
fn enumerate_cyclic_base_finds_the_orbit_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("fusions");
    let o = tcc(&["enumerate", "--base", "cyclic:5", "--save-dir", saved.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["complete"], json!(true));
    let found: Vec<Value> = fs::read_dir(&saved)
        .unwrap()
        .map(|e| read_json(&e.unwrap().path())["colors"].clone())
        .collect();
    for g in ["cyclic:5", "cyclotomic:5:2", "agl1:5", "sym:5"] {
        let path = dir.path().join(format!("{}.json", g.replace(':', "_")));
        tcc(&["orb", "--group", g, "--out", path.to_str().unwrap()]);
        assert!(found.contains(&read_json(&path)["colors"]), "{}", g);
    }
}

#[test]
fn exhausted_budget_is_exit_3() {
    let o = tcc(&["enumerate", "--base", "cyclic:7", "--ast-only", "--node-limit", "10"]);
    assert_eq!(code(&o), 3);
    let r = report(&o);
    assert_eq!(r["complete"], json!(false));
    check_report_schema(&r);
}

#[test]
fn budget_seconds_from_environment() {
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_tcc"))
            .args(["enumerate", "--base", "agl1:5"])
            .env("TCC_BUDGET_SECONDS", value)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("60")), 0);
    assert_eq!(code(&run("-1")), 2);
    assert_eq!(code(&run("soon")), 2);
}

#[test]
fn verify_suites() {
    let o = tcc(&["verify", "--suite", "lemma41", "--max-p", "10000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["verdict"], json!("PASS"));

    let o = tcc(&["verify", "--suite", "thm51", "--p", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("2 configurations"));

    let o = tcc(&["verify", "--suite", "starred", "--group", "psl:2:11"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("starred classes: 2"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = tcc(&["verify", "--suite", "thm11", "--p", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read_json(&out);
    check_report_schema(&r);
    assert_eq!(r["p"], json!(5));

    assert_eq!(code(&tcc(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&tcc(&["verify", "--suite", "thm51", "--p", "7"])), 2);
    assert_eq!(code(&tcc(&["verify", "--suite", "thm51"])), 2);
}

#[test]
fn output_is_independent_of_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.json");
    tcc(&["orb", "--group", "cyclic:7", "--out", input.to_str().unwrap()]);
    let one = tcc(&["--jobs", "1", "enumerate", "--input", input.to_str().unwrap(), "--ast-only"]);
    let four = tcc(&["--jobs", "4", "enumerate", "--input", input.to_str().unwrap(), "--ast-only"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&tcc(&["--jobs", "0", "orb", "--group", "sym:5"])), 2);
}

#[test]
fn schur_tools() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    fs::write(&good, json!({"carrier": "fstar:5", "classes": [[1], [2, 3], [4]]}).to_string()).unwrap();
    fs::write(&bad, json!({"carrier": "fstar:5", "classes": [[1], [2], [3, 4]]}).to_string()).unwrap();
    let o = tcc(&["schur", "check", "--input", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = tcc(&["schur", "check", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("not a Schur partition"));

    let o = tcc(&["schur", "enumerate", "--carrier", "zmod:4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("3 Schur partitions of zmod:4"));

    let o = tcc(&["schur", "cyclotomic", "--carrier", "zmod:6", "--exponents", "1,5"]);
    assert_eq!(stdout(&o).trim(), "[[0],[1,5],[2,4],[3]]");

    let z6 = dir.path().join("z6.json");
    fs::write(&z6, json!({"carrier": "zmod:6", "classes": [[0], [3], [1, 2, 4, 5]]}).to_string()).unwrap();
    let o = tcc(&["schur", "classify", "--input", z6.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("CaseA"));
}
