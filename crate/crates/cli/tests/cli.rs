use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_packcover"))
}

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("packcover-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["norm"]).status.code(), Some(2));
    assert_eq!(run(&["report", "named", "--family", "hilbert"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn validation_errors_exit_3() {
    let d = workdir("invalid");
    let bad = write(&d, "bad.json", r#"{"kind":"lp","p":0.5,"n":2}"#);
    let o = run(&["norm", "--space", bad.to_str().unwrap(), "--x", "1,2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let missing = d.join("missing.json");
    assert_eq!(run(&["norm", "--space", missing.to_str().unwrap(), "--x", "1"]).status.code(), Some(3));
    let l2 = write(&d, "l2.json", r#"{"kind":"lp","p":2,"n":2}"#);
    assert_eq!(run(&["norm", "--space", l2.to_str().unwrap(), "--x", "1,2,3"]).status.code(), Some(3));
    assert_eq!(run(&["suite", "--only", "42"]).status.code(), Some(3));
    assert_eq!(run(&["report", "step1", "--p", "2", "--eps", "0"]).status.code(), Some(3));
}

#[test]
fn norm_of_a_point() {
    let d = workdir("norm");
    let l2 = write(&d, "l2.json", r#"{"kind":"lp","p":2,"n":2}"#);
    let v = stdout_json(&run(&["norm", "--space", l2.to_str().unwrap(), "--x", "3,4"]));
    assert_eq!(v["norm"], 5.0);
    let f: Vec<f64> = serde_json::from_value(v["functional"].clone()).unwrap();
    assert!((f[0] - 0.6).abs() < 1e-15 && (f[1] - 0.8).abs() < 1e-15);
    let linf = write(&d, "linf.json", r#"{"kind":"lp","p":"inf","n":2}"#);
    let v = stdout_json(&run(&["norm", "--space", linf.to_str().unwrap(), "--x", "-3,1"]));
    assert_eq!(v["norm"], 3.0);
    assert_eq!(v["dual_norm"], 4.0);
}

#[test]
fn gamma_star_of_square_lattice_in_max_norm() {
    let d = workdir("gstar");
    let s = write(&d, "linf2.json", r#"{"kind":"lp","p":"inf","n":2}"#);
    let l = write(&d, "2z2.json", r#"{"basis":[[2,0],[0,2]]}"#);
    let v = stdout_json(&run(&["gamma-star", "--space", s.to_str().unwrap(), "--lattice", l.to_str().unwrap()]));
    let (lo, hi) = (v["gamma_star"]["lo"].as_f64().unwrap(), v["gamma_star"]["hi"].as_f64().unwrap());
    assert!(lo <= 1.0 && 1.0 <= hi, "[{lo}, {hi}]");
    let singular = write(&d, "flat.json", r#"{"basis":[[1,1],[2,2]]}"#);
    let o = run(&["gamma-star", "--space", s.to_str().unwrap(), "--lattice", singular.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gamma_two_ladder() {
    let v = stdout_json(&run(&["report", "gamma2", "--ms", "2,4,8"]));
    let values: Vec<f64> = serde_json::from_value(v["entries"][0]["value"]["values"].clone()).unwrap();
    for (x, want) in values.iter().zip([1.4142, 1.6818, 1.8340]) {
        assert!((x - want).abs() < 5e-5, "{x} vs {want}");
    }
    let o = run(&["report", "gamma2", "--ms", "2,4,8", "--format", "table"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("1.414214, 1.681793, 1.834008"), "{text}");
}

#[test]
fn named_reports() {
    let v = stdout_json(&run(&["report", "named", "--family", "lp", "--p", "2", "--r", "1"]));
    let e = v["entries"].as_array().unwrap().iter().find(|e| e["name"] == "gamma = gamma*").unwrap();
    assert!((e["value"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    let v = stdout_json(&run(&["report", "named", "--family", "function-lp", "--p", "3", "--r", "inf"]));
    assert!(v["entries"].as_array().unwrap().iter().any(|e| e["value"]["hi"].is_null() && e["value"]["type"] == "range"));
    let v = stdout_json(&run(&["report", "minkowski"]));
    assert_eq!(v["all_hold"], true);
    let v = stdout_json(&run(&["report", "step1", "--p", "1", "--eps", "0.5"]));
    assert_eq!(v["n"], 2);
}

#[test]
fn modulus_of_the_euclidean_plane() {
    let d = workdir("modulus");
    let s = write(&d, "l2.json", r#"{"kind":"lp","p":2,"n":2}"#);
    let sp = s.to_str().unwrap();
    let v = stdout_json(&run(&["modulus", "--space", sp, "--t", "1", "--starts", "8"]));
    let exact = 1.0 - 3f64.sqrt() / 2.0;
    assert!(v["lo"].as_f64().unwrap() <= exact + 1e-12 && exact <= v["hi"].as_f64().unwrap() + 1e-12);
    let v = stdout_json(&run(&["modulus", "--space", sp, "--kind", "tangential-table", "--grid", "5", "--starts", "8"]));
    assert_eq!(v["modulus"]["form"], "table");
    assert_eq!(v["intervals"].as_array().unwrap().len(), 5);
}

#[test]
fn subgroup_pipeline() {
    let d = workdir("subgroup");
    let s = write(&d, "l2.json", r#"{"kind":"lp","p":2,"n":6}"#);
    let t = write(&d, "t.json", "[[1,0,0,0,0,0],[0,2,0,0,0,0],[1,1,0,0,0,0]]");
    let r = d.join("r.json");
    let o = run(&["subgroup", "build", "--space", s.to_str().unwrap(), "--targets", t.to_str().unwrap(), "--out", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("r.json.manifest.json").exists());
    let built: Value = manifest(&r);
    assert_eq!(built["log"].as_array().unwrap().len(), 3);
    // an unverified result cannot be combined
    assert_eq!(run(&["subgroup", "product", "--result", r.to_str().unwrap(), "--other", r.to_str().unwrap()]).status.code(), Some(3));
    let v = stdout_json(&run(&["subgroup", "verify", "--result", r.to_str().unwrap(), "--radius", "3"]));
    let min = v["verified"]["min_nonzero_norm"].as_f64().unwrap();
    assert!(min >= built["theta"].as_f64().unwrap() - 1e-9);
    assert!(v["gamma_star_upper"].as_f64().unwrap() >= 2f64.sqrt() - 1e-9);
    let vr = write(&d, "v.json", &v.to_string());
    let p = stdout_json(&run(&["subgroup", "product", "--result", vr.to_str().unwrap(), "--other", vr.to_str().unwrap()]));
    assert_eq!(p["generators"][0].as_array().unwrap().len(), 12);
    assert_eq!(run(&["subgroup", "verify", "--result", r.to_str().unwrap(), "--radius", "0.5"]).status.code(), Some(3));
}

#[test]
fn tile_round_and_distance() {
    let d = workdir("tile");
    let f = write(&d, "f.json", r#"{"cells":["c0","c1","c2"],"values":[0.9,-1.0,3.2]}"#);
    let v = stdout_json(&run(&["tile", "round", "--input", f.to_str().unwrap()]));
    assert_eq!(v["rounded"]["values"], serde_json::json!([0.0, 0.0, 4.0]));
    assert!(v["cell_distance"].as_f64().unwrap() <= 1.0);
    let g = write(&d, "g.json", r#"{"cells":["c0.0","c0.1","c1","c2"],"values":[0,2,0,4]}"#);
    let v = stdout_json(&run(&["tile", "distance", "--input", f.to_str().unwrap(), "--other", g.to_str().unwrap()]));
    assert!((v["sup_distance"].as_f64().unwrap() - 1.1).abs() < 1e-12);
    let overlapping = write(&d, "o.json", r#"{"cells":["a","a.0"],"values":[0,0]}"#);
    assert_eq!(run(&["tile", "round", "--input", overlapping.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn quick_suite_passes() {
    let o = run(&["suite", "--quick"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 4, "{text}");
}

/// Runs `args` with `--out` in a fresh directory; returns the output bytes
/// and the manifest.
fn run_to_file(tag: &str, args: &[&str]) -> (Vec<u8>, Value) {
    let d = workdir(tag);
    let out = d.join("out.json");
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    let o = run(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    (std::fs::read(&out).unwrap(), manifest(&d.join("out.json.manifest.json")))
}

fn digest(m: &Value) -> String {
    m["outputs"][0]["sha256"].as_str().unwrap().to_string()
}

#[test]
fn manifests_reproduce_outputs() {
    let d = workdir("repro");
    let s = write(&d, "l2.json", r#"{"kind":"lp","p":2,"n":2}"#);
    let sp = s.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["dispersion", "--space", sp, "-m", "5,7", "--seed", "7", "--budget", "60"],
        vec!["optimize", "--space", sp, "--seed", "3", "--budget", "4000"],
        vec!["modulus", "--space", sp, "--kind", "t-x", "--starts", "4", "--seed", "11"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (bytes_a, ma) = run_to_file(&format!("repro-a{i}"), args);
        let (bytes_b, mb) = run_to_file(&format!("repro-b{i}"), args);
        assert_eq!(bytes_a, bytes_b);
        assert_eq!(digest(&ma), digest(&mb));
        assert_eq!(ma["seeds"], mb["seeds"]);
        assert_eq!(ma["budgets"], mb["budgets"]);
        assert_eq!(ma["inputs"], mb["inputs"]);
        assert_eq!(ma["version"], env!("CARGO_PKG_VERSION"));
        assert!(ma["wall_seconds"].as_f64().unwrap() >= 0.0);

        // replaying the recorded command line reproduces the digest
        let argv: Vec<String> = serde_json::from_value(ma["command_line"].clone()).unwrap();
        let replay = d.join(format!("replay{i}.json"));
        let mut again: Vec<String> = argv[1..].to_vec();
        let k = again.iter().position(|a| a == "--out").unwrap();
        again[k + 1] = replay.to_str().unwrap().into();
        let o = bin().args(&again).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(digest(&manifest(&d.join(format!("replay{i}.json.manifest.json")))), digest(&ma));
    }
    // a different seed is recorded and changes the output
    let (_, m7) = run_to_file("repro-s7", &["optimize", "--space", sp, "--seed", "7", "--budget", "2000"]);
    let (_, m8) = run_to_file("repro-s8", &["optimize", "--space", sp, "--seed", "8", "--budget", "2000"]);
    assert_eq!(m7["seeds"]["optimize"], 7);
    assert_ne!(digest(&m7), digest(&m8));
}

#[test]
fn manifest_goes_to_stderr_without_out() {
    let o = run(&["report", "step1", "--p", "2", "--eps", "0.9"]);
    let m: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"][0]["path"], "<stdout>");
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}
