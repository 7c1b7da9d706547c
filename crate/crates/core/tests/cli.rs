use std::process::{Command, Output};

fn mvnm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvnm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with_cache<'a>(dir: &'a str, args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--cache-dir", dir]);
    v
}

#[test]
fn moment_examples() {
    let o = mvnm(&["moment", "--k", "2", "--m", "3,3", "--cov", "symbolic", "--engine", "wick"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "6*c12^3 + 9*c12\n");

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = mvnm(&with_cache(d, &["moment", "--k", "3", "--m", "1,1,1", "--cov", "symbolic", "--engine", "pure"]));
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn numeric_engines_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let run = |e: &str| stdout(&mvnm(&with_cache(d, &["moment", "--k", "3", "--m", "40,30,90", "--cov", "1/2,1/3,1/4", "--engine", e])));
    let w = run("wick");
    assert!(!w.trim().is_empty());
    assert_eq!(w, run("stein"));
    assert_eq!(w, run("pure"));
    // the recurrence found on the first pure run was persisted
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
    assert_eq!(w, run("pure"));
}

#[test]
fn json_is_engine_tagged() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for e in ["wick", "stein", "pure"] {
        let o = mvnm(&with_cache(d, &["moment", "--k", "2", "--m", "3,3", "--engine", e, "--format", "json"]));
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["engine"], e);
        assert_eq!(v["k"], 2);
        assert_eq!(v["cov"], "symbolic");
        assert_eq!(v["metadata"]["fallback_used"], false);
        assert_eq!(v["result"][0]["coeff"], "6");
        assert_eq!(v["result"][0]["exps"]["c12"], 3);
    }
}

#[test]
fn coeff_examples() {
    let o = mvnm(&["coeff", "--k", "3", "--m", "20,20,20", "--cross", "c12=9,c13=7,c23=5"]);
    assert_eq!(stdout(&o), "444975998773143505634352562176000000000\n");
    let o = mvnm(&["coeff", "--k", "2", "--m", "300,200", "--cross", "c12=100"]);
    assert_eq!(stdout(&o).trim().len(), 564);
    let o = mvnm(&["coeff", "--k", "2", "--m", "2,2", "--cross", "c12=1"]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn table_grid_4() {
    let o = mvnm(&["table", "--k", "3", "--grid", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 64);
    assert!(text.lines().any(|l| l == "1,1,2\tc12 + 2*c13*c23"));
    assert!(text.lines().any(|l| l == "1,1,1\t0"));
}

#[test]
fn table_diagonal_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diag.txt");
    let o = mvnm(&["table", "--k", "3", "--diagonal", "4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().last().unwrap().starts_with("8,8,8\t"));
}

#[test]
fn discover_examples() {
    let o = mvnm(&["discover", "--k", "2", "--direction", "1", "--fixed", "m2=0", "--cov", "1/2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 1);
    assert_eq!(v["step"], 2);
    assert_eq!(v["coeffs"], serde_json::json!([["1", "0"], ["1", "-1"]]));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec.json");
    let o = mvnm(&["discover", "--k", "2", "--direction", "1", "--fixed", "m2=2", "--cov", "symbolic", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("order "));
    let rec = mvnm::pure::Recurrence::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec.direction, 0);

    let o = mvnm(&["discover", "--k", "3", "--direction", "3", "--fixed", "m1=4,m2=4", "--cov", "1/2,1/3,1/4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["order"].as_u64(), v["coeffs"][0].as_array().map(Vec::len)), (Some(2), Some(4)));
}

#[test]
fn exit_codes() {
    assert_eq!(mvnm(&["moment", "--k", "2", "--m", "3"]).status.code(), Some(2));
    assert_eq!(mvnm(&["moment", "--k", "2", "--m", "3,x"]).status.code(), Some(2));
    assert_eq!(mvnm(&["moment", "--k", "2", "--m", "3,3", "--cov", "1/0"]).status.code(), Some(2));
    assert_eq!(mvnm(&["moment", "--k", "2", "--m", "3,3", "--engine", "maple"]).status.code(), Some(2));
    assert_eq!(mvnm(&["coeff", "--k", "2", "--m", "2,2", "--cross", "c13=1"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let strict = ["moment", "--k", "2", "--m", "99,1", "--cov", "1/3", "--max-order", "1", "--max-degree", "0"];
    let mut args = with_cache(d, &strict);
    args.push("--no-fallback");
    assert_eq!(mvnm(&args).status.code(), Some(3));
    let o = mvnm(&with_cache(d, &strict));
    assert!(o.status.success());

    let bad = dir.path().join("missing").join("t.txt");
    assert_eq!(mvnm(&["table", "--k", "3", "--grid", "2", "--out", bad.to_str().unwrap()]).status.code(), Some(4));

    let o = mvnm(&["discover", "--k", "2", "--direction", "1", "--cov", "1/3", "--max-order", "1", "--max-degree", "0"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn deterministic_output() {
    let a = mvnm(&["table", "--k", "2", "--grid", "7", "--engine", "stein"]);
    let b = mvnm(&["table", "--k", "2", "--grid", "7", "--engine", "stein"]);
    assert_eq!(a.stdout, b.stdout);
}
