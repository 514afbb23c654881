use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bloch-synth")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error JSON on stderr")
}

#[test]
fn compare_near_quarter_pi() {
    let out = run(&["compare", "--alpha", "0.005"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((ratio / std::f64::consts::FRAC_PI_4 - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn synth_south_pole_is_excluded() {
    let out = run(&["synth", "--alpha", "0.25", "--beta", "0.785398163", "--target", "0,0,-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "TargetInCutLocusNeighborhood");
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() > 20);
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["synth", "--target", "1,2"][..],
        &["synth", "--target", "2,0,0"],
        &["front", "--time", "1", "--alpha", "0.9"],
        &["compare", "--alpha", "0.1", "--e", "1"],
        &["suboptimal", "--alpha", "0.1", "--beta", "0.3", "--strategy", "s1"],
        &["extremal", "--family", "qq", "--s", "0.1", "--time", "1"],
        &["verify", "--suite", "nope"],
        &["no-such-command"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&out);
        assert!(e["error"].is_string() && e["message"].is_string(), "{args:?}");
    }
}

#[test]
fn synth_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.json");
    let out = run(&["synth", "--e", "1", "--m1", "0.2", "--m2", "0.2", "--target", "0.6,0,0.8", "--out", f.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&f);
    let keys = ["family", "s", "n", "phase", "leftover", "total_time", "physical_time", "switch_times", "final_state", "residual"];
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), keys.len());
    for k in keys {
        assert!(obj.contains_key(k), "{k}");
    }
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
    assert!(v["physical_time"].as_f64().unwrap() < v["total_time"].as_f64().unwrap());
    let x: Vec<f64> = v["final_state"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    assert!((x[0] - 0.6).abs() < 1e-9 && (x[2] - 0.8).abs() < 1e-9);
}

fn csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn csv_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let cases: [(&[&str], &str, &str, usize); 4] = [
        (&["extremal", "--family", "mp", "--s", "0.3", "--time", "2", "--dt", "0.1"], "e.csv", "t,u1,u2,x1,x2,x3", 6),
        (&["front", "--time", "3", "--samples", "16"], "f.csv", "theta,x1,x2,x3", 4),
        (&["curves", "--k", "3", "--samples", "11"], "c.csv", "k,s,x1,x2,x3,c1,c2,locally_optimal", 8),
        (&["loci", "--samples", "12"], "l.csv", "label,u1,u2,x1,x2,x3", 6),
    ];
    for (args, name, header, width) in cases {
        let path = p(name);
        let mut a = args.to_vec();
        a.extend(["--out", path.to_str().unwrap()]);
        let out = run(&a);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let (h, rows) = csv(&path);
        assert_eq!(h, header);
        assert!(!rows.is_empty());
        for r in &rows {
            assert_eq!(r.len(), width);
        }
    }
    let (_, rows) = csv(&p("e.csv"));
    // every dt plus the switching instants
    assert!(rows.len() >= 21);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert!((rows.last().unwrap()[0].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    for r in &rows {
        let x: Vec<f64> = r[3..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() - 1.0).abs() < 1e-12);
    }
    let (_, rows) = csv(&p("f.csv"));
    assert_eq!(rows.len(), 16);
    let (_, rows) = csv(&p("l.csv"));
    assert_eq!(rows.len(), 5 * 12);
    let (_, rows) = csv(&p("c.csv"));
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[0] == "3" && (r[7] == "true" || r[7] == "false")));
}

#[test]
fn strategy_and_oracle_json() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s2.json");
    assert!(run(&["suboptimal", "--alpha", "0.1", "--strategy", "s2", "--out", f.to_str().unwrap()]).status.success());
    let v = read_json(&f);
    assert!(v["miss_angle"].as_f64().unwrap() < 1e-8);
    assert!(v["gamma"].is_number());
    let f = dir.path().join("s1.json");
    assert!(run(&["suboptimal", "--alpha", "0.1", "--strategy", "s1", "--out", f.to_str().unwrap()]).status.success());
    let v = read_json(&f);
    assert!(v.get("gamma").is_none());
    assert_eq!(v["n"], 6);

    let f = dir.path().join("o.json");
    let out = run(&["oracle", "--target", "0.3,0,0.9539392014169457", "--dt", "0.05", "--eps", "0.05", "--out", f.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&f);
    for k in ["target", "t_lower", "t_lo", "t_hi", "dt", "eps", "frontier_peak"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert!(v["t_lower"].as_f64().unwrap() <= v["t_hi"].as_f64().unwrap());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["front", "--time", "5", "--samples", "64"],
        &["synth", "--alpha", "0.2", "--target", "-0.3,0.5,0.8124038404635961"],
        &["verify", "--suite", "synthesis", "--seed", "11"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let files: Vec<_> = (0..2)
            .map(|j| {
                let f = dir.path().join(format!("{i}-{j}"));
                let mut a = args.to_vec();
                a.extend(["--out", f.to_str().unwrap()]);
                assert!(run(&a).status.success(), "{args:?}");
                std::fs::read(&f).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1], "{args:?}");
    }
}
