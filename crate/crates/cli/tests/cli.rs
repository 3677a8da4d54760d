use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractal-spectra"))
        .args(args)
        .env("FRACTAL_SPECTRA_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn cache_files(dir: &Path) -> usize {
    fs::read_dir(dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "json")).count()
}

#[test]
fn spectrum_both_matches() {
    let o = run(&["sg", "spectrum", "--level", "3", "--method", "both", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eigenvalue,multiplicity,dense_eigenvalue,dense_multiplicity,match"));
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty() && rows.iter().all(|r| r.ends_with(",true")));
    let total: usize = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 42);
}

#[test]
fn level_guard_exits_one() {
    let o = run(&["sg", "spectrum", "--level", "99"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("LevelTooLarge"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["sg", "spectrum"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "r", "--z0", "0.75", "--s", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["sg", "graph", "--level", "1", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn riemann_check_at_two() {
    let v = json(&run(&["zeta", "riemann-check", "--s", "2"]));
    let lhs = v["lhs"].as_f64().unwrap();
    assert!((lhs - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    assert!(v["abs_err"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn graph_export_schema() {
    let v = json(&run(&["sg", "graph", "--level", "1"]));
    assert_eq!(v["level"], 1);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["edges"].as_array().unwrap().len(), 9);
    assert_eq!(v["boundary"], serde_json::json!([0, 1, 2]));
}

#[test]
fn tree_export_schema() {
    let v = json(&run(&["sg", "spectrum", "--level", "2"]));
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    for e in levels[2].as_array().unwrap() {
        let b = e["branch"].as_str().unwrap();
        assert!(["+", "-", "initial"].contains(&b));
        assert_eq!(e["parent"].is_null(), b == "initial");
    }
}

#[test]
fn harmonic_and_fractal_eigenvalue() {
    let o = run(&["sg", "harmonic", "--boundary", "1,0,0", "--level", "1", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("index,x,y,value\n"));
    assert!(text.contains("\n3,0.5,0,0.4\n"), "{text}");
    let v = json(&run(&["sg", "harmonic", "--boundary", "-1,0.5,2", "--level", "2"]));
    // Edge differences 1.5, 1.5 and 3 on the level-0 triangle.
    let e0 = 2.0 * 1.5f64.powi(2) + 3f64.powi(2);
    assert!((v["energy"].as_f64().unwrap() - e0).abs() < 1e-10);
    let v = json(&run(&["sg", "fractal-eigenvalue", "--seed", "1.5", "--m0", "0", "--signs", "", "--tol", "1e-12"]));
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let o = run(&["sg", "fractal-eigenvalue", "--seed", "0.7", "--m0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidSeed"));
}

#[test]
fn sl_commands() {
    let v = json(&run(&["sl", "params", "--alpha", "0.5"]));
    assert_eq!(v["gamma"].as_f64().unwrap(), 4.0);
    let v = json(&run(&["sl", "propagator", "--alpha", "0.5", "--lambda", "4", "--depth", "16"]));
    assert!((v["a"][0].as_f64().unwrap() - 2f64.cos()).abs() < 1e-6);
    assert!((v["det"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&run(&["sl", "check-functional-equation", "--alpha", "0.4", "--lambda-grid", "0.5,2,7"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["passed"], true);
    let o = run(&["sl", "spectrum", "--alpha", "0.5", "--blowup", "0", "--lambda-max", "400", "--depth", "14", "--grid", "400", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("value,k,p\n"), "{}", stderr(&o));
    let first: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first / std::f64::consts::PI.powi(2) - 1.0).abs() < 1e-6);
    let o = run(&["sl", "spectrum", "--alpha", "0.5", "--blowup", "inf", "--lambda-max", "100", "--depth", "12", "--grid", "200"]);
    assert!(stderr(&o).contains("UnsupportedAlpha"));
}

#[test]
fn generating_set_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sl", "generating-set", "--alpha", "0.4", "--lambda-max", "500", "--depth", "12", "--grid", "500"];
    let a = run_in(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(cache_files(dir.path()), 1);
    let b = run_in(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(cache_files(dir.path()), 1);

    let mut deeper = args;
    deeper[7] = "13";
    let c = run_in(dir.path(), &deeper);
    assert!(c.status.success());
    assert_eq!(cache_files(dir.path()), 2);

    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["depth"], 12);
    assert!(!v["roots"].as_array().unwrap().is_empty());

    for entry in fs::read_dir(dir.path()).unwrap() {
        fs::write(entry.unwrap().path(), "garbage").unwrap();
    }
    let d = run_in(dir.path(), &args);
    assert!(d.status.success());
    assert_eq!(d.stdout, a.stdout);
    assert!(stderr(&d).contains("warning"));
}

#[test]
fn unwritable_cache_is_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, "").unwrap();
    let o = run_in(&file, &["sl", "generating-set", "--alpha", "0.5", "--lambda-max", "100", "--depth", "10", "--grid", "200"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("cache disabled"));
}

#[test]
fn lattice_commands() {
    let v = json(&run(&["lattice", "trace", "--u0", "0", "--u1", "3"]));
    assert!((v["u1p"][0].as_f64().unwrap() - 1.8).abs() < 1e-12);
    assert!((v["closed_form"][1][0].as_f64().unwrap() - 0.6).abs() < 1e-12);
    let v = json(&run(&["lattice", "g", "--z0", "1", "--z1", "1"]));
    assert_eq!(v["z0"], serde_json::json!([1.0, 0.0]));
    assert_eq!(v["z1"], serde_json::json!([1.0, 0.0]));
    let o = run(&["lattice", "g", "--z0", "0", "--z1", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["lattice", "conjugacy", "--samples", "20", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 21);
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[2] <= 1e-12 && f[3] <= 1e-12 && f[4] <= 1e-12);
    }
}

#[test]
fn zeta_commands() {
    let o = run(&["zeta", "r", "--z0", "1.25", "--s", "4", "--depth", "14", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("s_re,s_im,value_re,value_im,error_estimate\n4,0,"), "{text}");
    let o = run(&["zeta", "r", "--z0", "0.75", "--s", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("OutsideConvergenceStrip"));
    let v = json(&run(&["zeta", "sg", "--s", "4,0", "--depth", "16"]));
    assert!(v["value"][0].as_f64().unwrap() > 0.0 && v["error"].as_f64().unwrap().is_finite());
    let o = run(&["zeta", "sg", "--s", "0,0"]);
    assert!(stderr(&o).contains("NearPole"));
    let v = json(&run(&["zeta", "poles", "--factor", "5,1", "--window", "-1,1,-10,10"]));
    let poles = v.as_array().unwrap();
    assert_eq!(poles.len(), 3);
    assert_eq!(poles[1]["n"], 0);
    assert_eq!(poles[2]["n"], 2);
    let v = json(&run(&["zeta", "poles", "--factor", "5,1", "--window", "1,-1,0,1"]));
    assert!(v.as_array().unwrap().is_empty());
}

#[test]
fn zeta_sl_modes() {
    let common = ["--alpha", "0.4", "--lambda-max", "2e4", "--depth", "14", "--grid", "2000"];
    let dir = tempfile::tempdir().unwrap();
    let mut a = vec!["zeta", "sl", "--s", "4"];
    a.extend(common);
    let h0 = json(&run_in(dir.path(), &a));
    let mut u = vec!["zeta", "sl", "--s", "4", "--unbounded"];
    u.extend(common);
    let r = json(&run_in(dir.path(), &u));
    assert_eq!(r["branch"], "inner");
    let (p, q) = (r["product"][0].as_f64().unwrap(), h0["value"][0].as_f64().unwrap());
    assert!((p - q).abs() <= 1e-12 * q);
    let mut neg = vec!["zeta", "sl", "--s", "-1", "--unbounded"];
    neg.extend(common);
    let r = json(&run_in(dir.path(), &neg));
    assert_eq!(r["branch"], "outer");
    assert!(r["prefactor"].is_null());
    let mut edge = vec!["zeta", "sl", "--s", "0,3", "--unbounded"];
    edge.extend(common);
    assert!(stderr(&run_in(dir.path(), &edge)).contains("OnCircleBoundary"));
    let mut both = vec!["zeta", "sl", "--s", "4", "--n", "1", "--unbounded"];
    both.extend(common);
    assert_eq!(run_in(dir.path(), &both).status.code(), Some(2));
}

#[test]
fn deterministic_output_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let report = dir.path().join("report.json");
    let args = ["sg", "spectrum", "--level", "4", "--method", "dense", "--format", "csv", "--no-cache"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", out.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    let c = run(&with_file);
    assert!(c.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert!(r["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(r["values_emitted"].as_u64().unwrap() > 0);
    assert!(r["error"].is_null());
}

#[test]
fn verify_quick_passes() {
    let o = run(&["verify", "all", "--quick"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!text.contains("FAIL "));
    assert!(text.trim_end().ends_with("0 failed"));
}
