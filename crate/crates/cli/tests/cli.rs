use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homometry"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homometry"))
        .args(args)
        .env("HOMOMETRY_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Output without the header line.
fn body(o: &Output) -> Vec<String> {
    let text = stdout(o);
    let mut lines = text.lines();
    let head = lines.next().expect("header line");
    assert!(head.starts_with("# homometry "), "{head}");
    lines.map(str::to_string).collect()
}

#[test]
fn builtin_pair_is_homometric() {
    let o = run(&["homometry", "--builtin"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), ["homometric: true"]);
}

#[test]
fn user_sets() {
    let dir = std::env::temp_dir().join(format!("homometry-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    let c = dir.join("c.json");
    std::fs::write(&a, r#"{"dim":1,"points":[[0],[1],[3]]}"#).unwrap();
    std::fs::write(&b, r#"{"dim":1,"points":[[0],[2],[3]]}"#).unwrap();
    std::fs::write(&c, r#"{"dim":1,"points":[[0],[1],[2]]}"#).unwrap();
    let ab = run(&["homometry", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(ab.status.code(), Some(0));
    assert_eq!(body(&ab)[0], "homometric: true");
    let ac = run(&["homometry", "--a", a.to_str().unwrap(), "--b", c.to_str().unwrap()]);
    assert_eq!(ac.status.code(), Some(0));
    assert_eq!(body(&ac)[0], "homometric: false");
    let missing = run(&["homometry", "--a", "/nonexistent.json", "--b", b.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn covariogram_at_origin_is_the_area() {
    let o = run(&["covariogram", "--window", "P1", "--at", "0", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), ["15"]);
    let g = run(&["covariogram", "--window", "P2", "--lo", "-1", "--hi", "1", "--step", "1"]);
    let rows = body(&g);
    assert_eq!(rows[0], "x1,x2,cov");
    assert_eq!(rows.len(), 10);
    assert!(rows.contains(&"0,0,15".to_string()));
}

#[test]
fn bernoullised_autocorrelations_vanish() {
    let o = run(&[
        "autocorr", "--kind", "bernoullised", "--p", "0.5", "--n", "1048576", "--lags", "1..8", "--seed", "42",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&o);
    assert_eq!(rows[0], "m,value,N");
    assert_eq!(rows.len(), 9);
    for r in &rows[1..] {
        let v: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v.abs() < 0.01, "{r}");
    }
    assert!(stdout(&o).lines().next().unwrap().contains("seed=42"));
}

#[test]
fn identical_arguments_give_identical_bytes() {
    let args = ["comb", "--kind", "bernoullised", "--p", "0.3", "--n", "5000", "--seed", "7"];
    let a = run_env(&args, "1");
    let b = run_env(&args, "4");
    let c = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other = run(&["comb", "--kind", "bernoullised", "--p", "0.3", "--n", "5000", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
    let t1 = run_env(&["threepoint", "-R", "20,25", "--top", "3"], "1");
    let t2 = run_env(&["threepoint", "-R", "20,25", "--top", "3"], "3");
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn default_seed_is_reported() {
    let o = run(&["comb", "--kind", "bernoulli", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().next().unwrap().contains("seed=0"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("default seed 0"));
    assert_eq!(body(&o)[0], "index,weight");
    assert_eq!(body(&o).len(), 9);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["comb", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["comb", "--kind", "bernoulli", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["autocorr", "--n", "4", "--lags", "1..9"]).status.code(), Some(2));
    assert_eq!(run(&["covariogram", "--scale", "0", "--at", "1", "1"]).status.code(), Some(2));
    assert_eq!(run(&["modelset", "--shift", "0.5", "0.5", "-R", "5"]).status.code(), Some(2));
    assert_eq!(run(&["mld"]).status.code(), Some(0));
    assert_eq!(run(&["mld", "--t", "3", "5"]).status.code(), Some(3));
    assert_eq!(run_env(&["mld"], "zero").status.code(), Some(1));
}

#[test]
fn ratio_witness_and_singular_point() {
    let o = run(&["ratio"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&o);
    let violation: f64 = rows[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!(violation > 0.05);
    let s = run(&["ratio", "--at", "0", "0.3333333333333333"]);
    assert_eq!(body(&s)[0], "SINGULAR");
    let v = run(&["ratio", "--at", "0.2", "0.1", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    assert!((doc["data"]["abs"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn json_output_carries_the_header() {
    let o = run(&["autocorr", "--n", "64", "--lags", "0,1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["header"]["command"], "autocorr");
    assert_eq!(doc["header"]["params"]["kind"], "rs");
    assert_eq!(doc["data"][0]["m"], 0);
    assert_eq!(doc["data"][0]["value"], 1.0);
    assert_eq!(doc["data"][0]["N"], 64);
    let first_key = stdout(&o).lines().nth(1).unwrap().trim().to_string();
    assert!(first_key.starts_with("\"header\""), "{first_key}");
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("homometry-out-{}.csv", std::process::id()));
    let o = run(&["modelset", "-R", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(1).unwrap() == "a,b,c,d,px,py,ix,iy");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn tensor_modes() {
    let a = run(&["tensor", "--mode", "autocorr", "--lag", "3,5"]);
    let rows = body(&a);
    let f: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    let b: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(f, b);
    let e = run(&["tensor", "--mode", "entropy", "--n", "65536", "--rank", "1", "--p", "0.5", "--seed", "0"]);
    let rows = body(&e);
    let h1: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    let h2: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(h1 > 0.65 && h2 < h1);
    assert_eq!(run(&["tensor", "--rank", "3"]).status.code(), Some(2));
    assert_eq!(run(&["tensor", "--n", "4096"]).status.code(), Some(2));
}

#[test]
fn periodogram_and_entropy_tables() {
    let p = run(&["periodogram", "--n", "4096", "--bins", "8"]);
    let rows = body(&p);
    assert_eq!(rows[0], "k,value");
    assert_eq!(rows.len(), 9);
    let avg = run(&["periodogram", "--n", "4096", "--bins", "8192", "--average"]);
    let v: f64 = body(&avg)[0].parse().unwrap();
    assert!((v - 1.0).abs() < 1e-9);
    let e = run(&["entropy", "--kind", "bernoulli", "--n", "200000", "-L", "1..3", "--seed", "1"]);
    let rows = body(&e);
    assert_eq!(rows[0], "L,entropy");
    assert_eq!(rows.len(), 4);
}

#[test]
fn check_subcommand() {
    let list = run(&["check", "--list"]);
    assert_eq!(body(&list).len(), 16);
    let one = run(&["check", "--id", "1"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(body(&one)[0].starts_with("[PASS] 01 finite-homometry"));
    assert_eq!(run(&["check", "--id", "99"]).status.code(), Some(2));
}
