use std::path::Path;
use std::process::{Command, Output};

use onshell::validate_config;
use serde_json::Value;

const CHEAP: &str = r#"
name = "cheap"
[scenario]
k0 = 1.0
dir_out = [0.0, 0.0, 1.0]
eps_list = [0.1, 0.05, 0.025]
alpha_list = [0.0, 0.5, 1.0]

[[scatterers]]
center = [0.0, 0.0, 0.0]
potential = { kind = "gaussian", v0 = -1.0, a = 0.5 }
lmax = 2

[[scatterers]]
center = [0.0, 0.0, 6.0]
potential = { kind = "gaussian", v0 = -1.0, a = 0.5 }
lmax = 2

[numerics]
momentum_nodes = 8
p_max = 15.0
lmax_sum = 2
n_max = 2
schatten = false

[checks]
phase_law = false
alpha_flatness = false
"#;

fn onshell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onshell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn run_cheap(dir: &Path, text: &str) -> (Output, std::path::PathBuf) {
    let cfg = write(dir, "run.toml", text);
    let out = dir.join("out");
    let o = onshell(&[
        "run",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    (o, out)
}

#[test]
fn minimal_config_gets_defaults() {
    let v = validate_config(
        r#"
[scenario]
k0 = 2.0
dir_out = [1.0, 0.0, 0.0]
[[scatterers]]
center = [0.0, 0.0, 0.0]
potential = { kind = "square_well", v0 = -1.0, a = 1.0 }
"#,
    )
    .unwrap();
    let n = &v.scenario.numerics;
    assert_eq!(v.scenario.lmax, vec![8]);
    assert_eq!(n.momentum_nodes, 10);
    assert_eq!(n.n_max, 3);
    assert_eq!(n.eps_list.len(), 5);
    assert!((n.eps_list[0] - 0.05 * 4.0).abs() < 1e-15);
    assert_eq!(n.alpha_list.len(), 9);
    assert!(n.checks.phase_law && n.checks.tail);
    assert!(v.warnings.is_empty(), "{:?}", v.warnings);
}

#[test]
fn validate_names_bad_fields() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CHEAP.replace("k0 = 1.0", "k0 = -1.0");
    let o = onshell(&["validate", &write(dir.path(), "bad.toml", &bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scenario.k0"), "{err}");
}

#[test]
fn validate_collects_every_error() {
    let bad = CHEAP
        .replace("k0 = 1.0", "k0 = 0.0")
        .replace("a = 0.5 }\nlmax = 2\n\n[[", "a = -0.5 }\nlmax = 2\n\n[[")
        .replace("n_max = 2", "n_max = 7");
    let e = validate_config(&bad).unwrap_err();
    assert!(e.0.len() >= 3, "{:?}", e.0);
    assert!(e.0.iter().any(|m| m.starts_with("scenario.k0")));
    assert!(e.0.iter().any(|m| m.starts_with("scatterers[0].potential")));
    assert!(e.0.iter().any(|m| m.starts_with("numerics.n_max")));
}

#[test]
fn unknown_keys_are_rejected() {
    let bad = CHEAP.replace("p_max = 15.0", "p_max = 15.0\npmax = 3.0");
    let e = validate_config(&bad).unwrap_err();
    assert!(e.to_string().contains("pmax"), "{e}");
}

#[test]
fn non_unit_direction_warns() {
    let dir = tempfile::tempdir().unwrap();
    let text = CHEAP.replace("dir_out = [0.0, 0.0, 1.0]", "dir_out = [0.0, 0.0, 2.0]");
    let o = onshell(&["validate", &write(dir.path(), "w.toml", &text)]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("scenario.dir_out"), "{out}");
    assert!(out.contains("gap[0,1] = 0.743478"), "{out}");
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_cheap(dir.path(), CHEAP);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    assert_eq!(report["pairs"].as_array().unwrap().len(), 2);
    assert_eq!(report["born_terms"].as_array().unwrap().len(), 2);
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("schema_version,"));
    for f in [
        "y_alpha_0_1.csv",
        "x0_eps_1_0.csv",
        "structconst_sweep_0_1.csv",
    ] {
        let t = std::fs::read_to_string(out.join("plotdata").join(f)).unwrap();
        assert!(t.starts_with("schema_version,"), "{f}");
        assert!(t.lines().count() > 2, "{f}");
    }
}

#[test]
fn small_cutoff_fails_tail_check() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_cheap(dir.path(), &CHEAP.replace("p_max = 15.0", "p_max = 2.5"));
    assert_eq!(o.status.code(), Some(1));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let tail_failed = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"].as_str().unwrap().starts_with("tail") && c["passed"] == false);
    assert!(tail_failed);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL tail"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (_, oa) = run_cheap(a.path(), CHEAP);
    let (_, ob) = run_cheap(b.path(), CHEAP);
    for f in ["summary.csv", "plotdata/y_alpha_0_1.csv"] {
        assert_eq!(
            std::fs::read(oa.join(f)).unwrap(),
            std::fs::read(ob.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn structconst_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = onshell(&[
        "structconst",
        "--k0",
        "1.5",
        "--R",
        "0,0,3",
        "--lmax",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "schema_version,l,m,lp,mp,re_g,im_g");
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    assert_eq!(rows.len(), 81);
    // g_{00;00} = -exp(ik R) / R
    let (re, im): (f64, f64) = (rows[0][5].parse().unwrap(), rows[0][6].parse().unwrap());
    assert!((re + (4.5f64).cos() / 3.0).abs() < 1e-12);
    assert!((im + (4.5f64).sin() / 3.0).abs() < 1e-12);

    let bad = onshell(&[
        "structconst",
        "--k0",
        "1.0",
        "--R",
        "0",
        "--lmax",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
