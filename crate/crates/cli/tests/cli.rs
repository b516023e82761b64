use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracvel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_samples(dir: &Path, name: &str, f: impl Fn(f64) -> f64, n: usize) -> String {
    let path = dir.join(name);
    let mut file = fs::File::create(&path).unwrap();
    writeln!(file, "x,y").unwrap();
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        writeln!(file, "{x},{}", f(x)).unwrap();
    }
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_reports_converged_cusp() {
    let out = fracvel(&["analyze", "--fn", "cusp:a=0,beta=0.5,K=1", "--x", "0", "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"status\":\"converged\",\"value\":1.0"), "{text}");
    let doc = json(&out);
    assert_eq!(doc["meta"]["tool"], "fracvel");
    assert_eq!(doc["command"], "analyze");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["direction"], "forward");
    assert_eq!(results[1]["direction"], "backward");
    for r in results {
        assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(r["c2_holds"], true);
    }
}

#[test]
fn oscillatory_analysis_is_not_a_failure() {
    let out = fracvel(&[
        "analyze",
        "--fn",
        "chirp",
        "--x",
        "0",
        "--beta",
        "0.5",
        "--direction",
        "fwd",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"][0];
    assert_eq!(r["status"], "oscillatory");
    assert!(r["value"].is_null());
}

#[test]
fn analyze_csv_has_one_row_per_increment() {
    let out = fracvel(&[
        "analyze",
        "--fn",
        "cusp",
        "--x",
        "0",
        "--beta",
        "0.5",
        "--direction",
        "fwd",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("direction,eps,variation"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 8);
    assert!(rows[0].starts_with("forward,0.0625,"));
}

#[test]
fn scan_csv_rows() {
    let out = fracvel(&[
        "scan",
        "--fn",
        "cusp:a=0.5",
        "--interval",
        "0,1",
        "--beta",
        "0.5",
        "--grid",
        "11",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,velocity,direction,flagged"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11 * 2 - 2);
    let flagged: Vec<&Vec<&str>> = rows.iter().filter(|r| r[3] == "true").collect();
    assert_eq!(flagged.len(), 2);
    assert!(flagged.iter().all(|r| r[0] == "0.5"));
}

#[test]
fn scan_json_report() {
    let out = fracvel(&[
        "scan",
        "--fn",
        "cusps:at=0.25;0.5;0.75",
        "--interval",
        "0,1",
        "--beta",
        "0.5",
        "--grid",
        "101",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["grid_points"], 101);
    assert_eq!(r["isolated"], true);
    assert!((r["flagged_fraction"].as_f64().unwrap() - 3.0 / 101.0).abs() < 1e-12);
}

#[test]
fn lfd_reports_gap() {
    let out = fracvel(&["lfd", "--fn", "cusp", "--x", "0", "--beta", "0.5", "--direction", "fwd"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"][0];
    assert!(r["equivalence_gap"].as_f64().unwrap() <= 1e-3);
    assert_eq!(r["pass"], true);
    let lfd = r["lfd"]["value"].as_f64().unwrap();
    assert!((lfd - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-3);
}

#[test]
fn lfd_without_velocity_is_analysis_failure() {
    let out = fracvel(&[
        "lfd",
        "--fn",
        "chirp",
        "--x",
        "0",
        "--beta",
        "0.5",
        "--direction",
        "fwd",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json(&out)["results"][0];
    assert!(r["error"].as_str().unwrap().contains("not 0.5-differentiable"));
}

#[test]
fn verify_commands() {
    let out = fracvel(&[
        "verify",
        "--fn",
        "abscusp:a=0.5,K=-1",
        "--interval",
        "0,1",
        "--beta",
        "0.5",
        "--theorem",
        "rolle",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json(&out)["verdict"];
    assert_eq!(v["theorem"], "rolle");
    assert_eq!(v["witness"]["c"].as_f64(), Some(0.5));

    let out = fracvel(&[
        "verify",
        "--fn",
        "cusp",
        "--interval",
        "0,1",
        "--beta",
        "0.5",
        "--theorem",
        "weak-mean-value",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.starts_with("theorem,holds,c,notes\nweak_mean_value,true,0.0,"),
        "{text}"
    );
}

#[test]
fn unmet_hypothesis_exits_one() {
    // f(0) != f(1), so the hypothesis of Rolle's theorem fails
    let out = fracvel(&[
        "verify",
        "--fn",
        "cusp",
        "--interval",
        "0,1",
        "--beta",
        "0.5",
        "--theorem",
        "rolle",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn holder_on_weierstrass() {
    let out = fracvel(&["holder", "--fn", "weierstrass", "--x", "0.5", "--direction", "bwd"]);
    assert_eq!(out.status.code(), Some(0));
    let e = json(&out)["results"][0]["exponent"].as_f64().unwrap();
    assert!((e - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{e}");
}

#[test]
fn zoo_list_json_lines() {
    let out = fracvel(&["zoo", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 11);
    for l in &lines {
        assert!(l["id"].is_string());
        assert!(l["domain"]["lo"].is_number());
        assert!(l["marks"].is_array());
    }
    let csv = stdout(&fracvel(&["zoo", "list", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["analyze", "--fn", "cusp", "--x", "0", "--beta", "1.5"],
        &["analyze", "--fn", "cusp", "--x", "0"],
        &["analyze", "--fn", "cusp", "--x", "9", "--beta", "0.5"],
        &["analyze", "--fn", "sine", "--x", "0", "--beta", "0.5"],
        &["analyze", "--fn", "cusp", "--x", "0", "--beta", "0.5", "--unknown"],
        &["scan", "--fn", "cusp", "--interval", "1,0", "--beta", "0.5"],
        &["scan", "--fn", "cusp", "--interval", "0,5", "--beta", "0.5"],
        &[
            "verify",
            "--fn",
            "cusp",
            "--interval",
            "0,1",
            "--beta",
            "0.5",
            "--theorem",
            "fermat",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = fracvel(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = fracvel(&["analyze", "--fn", "cusp", "--x", "0", "--beta", "1.5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta must be in (0,1]"));
}

#[test]
fn sampled_data_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_samples(dir.path(), "abs.csv", |x| (x - 0.5).abs(), 1001);
    let spec = format!("file:{path}");
    let out = fracvel(&["analyze", "--fn", &spec, "--x", "0.5", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    let floor = 4.0e-3;
    for r in doc["results"].as_array().unwrap() {
        assert_eq!(r["status"], "converged");
        assert!((r["value"].as_f64().unwrap().abs() - 1.0).abs() < 1e-9);
        for e in r["increments"].as_array().unwrap() {
            assert!(e.as_f64().unwrap() > floor);
        }
    }
    let out = fracvel(&[
        "scan",
        "--fn",
        &spec,
        "--interval",
        "0.1,0.9",
        "--beta",
        "1",
        "--grid",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn explicit_schedule_below_sample_floor_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_samples(dir.path(), "lin.csv", |x| x, 101);
    let spec = format!("file:{path}");
    let out = fracvel(&["analyze", "--fn", &spec, "--x", "0.5", "--beta", "1", "--eps0", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("down.csv");
    let mut body = String::from("x,y\n");
    for i in 0..20 {
        body.push_str(&format!("{},{}\n", 20 - i, i));
    }
    fs::write(&path, body).unwrap();
    let spec = format!("file:{}", path.display());
    let out = fracvel(&["analyze", "--fn", &spec, "--x", "5", "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));
    let missing = format!("file:{}", dir.path().join("nope.csv").display());
    assert_eq!(
        fracvel(&["analyze", "--fn", &missing, "--x", "0", "--beta", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"fn": "cusp:a=0,beta=0.5,K=2", "x": 0, "beta": 0.5, "direction": "fwd"}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = fracvel(&["analyze", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r.as_array().unwrap().len(), 1);
    assert!((r[0]["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    // flags override, identical function sources are fine
    let out = fracvel(&[
        "analyze",
        "--config",
        cfg,
        "--fn",
        "cusp:a=0,beta=0.5,K=2",
        "--direction",
        "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"].as_array().unwrap().len(), 2);

    let out = fracvel(&["analyze", "--config", cfg, "--fn", "chirp"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conflicting function sources"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"fn": "cusp", "colour": 3}"#).unwrap();
    assert_eq!(
        fracvel(&["analyze", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let args = [
        "analyze",
        "--fn",
        "cusp",
        "--x",
        "0",
        "--beta",
        "0.5",
        "--out",
        dest.to_str().unwrap(),
    ];
    let out = fracvel(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read(&dest).unwrap();
    let direct = fracvel(&args[..7]).stdout;
    assert_eq!(written, direct);

    let blocked = dir.path().join("missing-dir").join("r.json");
    let out = fracvel(&[
        "analyze",
        "--fn",
        "cusp",
        "--x",
        "0",
        "--beta",
        "0.5",
        "--out",
        blocked.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "scan",
        "--fn",
        "weierstrass",
        "--interval",
        "0,1",
        "--beta",
        "0.6",
        "--grid",
        "21",
        "--tol",
        "1e-3",
    ];
    let a = fracvel(&args);
    let b = fracvel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(fracvel(&["--help"]).status.code(), Some(0));
    let v = fracvel(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}
