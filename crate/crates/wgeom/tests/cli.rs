use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgeom")).args(args).output().expect("binary runs")
}

fn scenario(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const H3: &str = r#"{"model": {"m": 3, "w": {"space_form": -1}}}"#;
const COMPARE: &str = r#"{
    "model": {"m": 3, "w": "r"},
    "comparison": {"w": {"space_form": -1}, "theta": "0"},
    "action": {"command": "compare", "theorem": "parabolicity-ricci"}
}"#;

#[test]
fn gaussian_space_is_parabolic() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "gaussian-r3.json", r#"{"model": {"m": 3, "w": "r", "f": "-r^2"}}"#);
    let o = wgeom(&["classify", "--model", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: Parabolic"));
    let q = wgeom(&["classify", "--model", s(&p), "--quiet"]);
    assert_eq!(stdout(&q).trim(), "Parabolic");
}

#[test]
fn hyperbolic_ball_capacity() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "h3.json", H3);
    let o = wgeom(&["capacity", "--model", s(&p), "--rho", "1", "--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    let coth1 = 1f64.cosh() / 1f64.sinh();
    assert!((v - 4.0 * std::f64::consts::PI / (coth1 - 1.0)).abs() < 1e-9 * v);
}

#[test]
fn euclidean_against_hyperbolic_comparison_passes() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "thm.json", COMPARE);
    let csv = dir.path().join("margins.csv");
    let o = wgeom(&["run", "--scenario", s(&p), "--csv", s(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: Pass"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,statement,r,R,lhs,rhs,raw_margin,normalized_margin,holds"));
    assert!(lines.clone().count() > 64);
    assert!(lines.all(|l| l.ends_with(",true")));
}

#[test]
fn failed_hypothesis_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    // H^3 has Ric = -2, below the flat comparison bound.
    let p = scenario(
        &dir,
        "bad.json",
        r#"{"model": {"m": 3, "w": {"space_form": -1}},
            "comparison": {"w": "r", "theta": "0"},
            "action": {"theorem": "parabolicity-ricci"}}"#,
    );
    let o = wgeom(&["compare", "--scenario", s(&p), "--quiet"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("HypothesisFail"));
}

#[test]
fn input_errors_exit_3_with_prefix() {
    let dir = TempDir::new().unwrap();
    let bad_json = scenario(&dir, "bad.json", "{ not json");
    let bad_theorem = scenario(&dir, "thm.json", &COMPARE.replace("parabolicity-ricci", "pythagoras"));
    let no_theta = scenario(&dir, "theta.json", &COMPARE.replace(r#", "theta": "0""#, ""));
    let bad_warp = scenario(&dir, "warp.json", r#"{"model": {"m": 3, "w": "2*r"}}"#);
    let missing = dir.path().join("missing.json");
    for args in [
        vec!["classify", "--model", s(&bad_json)],
        vec!["compare", "--scenario", s(&bad_theorem)],
        vec!["compare", "--scenario", s(&no_theta)],
        vec!["classify", "--model", s(&bad_warp)],
        vec!["classify", "--model", s(&missing)],
        vec!["run", "--scenario", s(&bad_warp)],
        vec!["classify"],
    ] {
        let o = wgeom(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("wgeom-error: "), "{args:?}");
    }
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "sweep.json", &COMPARE.replace("\"compare\"", "\"sweep\""));
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = wgeom(&["run", "--scenario", s(&p), "--grid", "16", "--csv", s(out), "--quiet"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "r,Vol_h,Area_h,q_iso,Cap_to_infinity,verdict_flags");
    assert_eq!(rows.len(), 17);
    let last: Vec<_> = rows[16].split(',').collect();
    assert_eq!(last[0], "10");
    assert_eq!(last[4], "125.663706144");
    assert_eq!(last[5], "hyperbolic;hyp=pass;ineq=pass");
}

#[test]
fn echoed_scenario_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let p = scenario(&dir, "h3.json", H3);
    let first = stdout(&wgeom(&["oracle", "--model", s(&p), "--grid", "512", "--rho", "0.5"]));
    let json_end = first.find("\n}\n").unwrap() + 2;
    let echo = &first["scenario: ".len()..json_end];
    let again = scenario(&dir, "echo.json", echo);
    let second = stdout(&wgeom(&["run", "--scenario", s(&again)]));
    assert_eq!(first, second);
}

#[test]
fn other_commands() {
    let dir = TempDir::new().unwrap();
    let e3 = scenario(&dir, "e3.json", r#"{"model": {"m": 3, "w": "r"}}"#);
    let quiet = |args: &[&str]| {
        let o = wgeom(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        stdout(&o).trim().to_string()
    };
    assert_eq!(quiet(&["volume", "--model", s(&e3), "--R", "1", "--quiet"]), "4.18879020479");
    assert_eq!(quiet(&["quotient", "--model", s(&e3), "--R", "3", "--quiet"]), "1");
    assert_eq!(quiet(&["capacity", "--model", s(&e3), "--rho", "1", "--R", "2", "--quiet"]), "25.1327412287");
    let tau: f64 = quiet(&["exit-time", "--model", s(&e3), "--quiet"]).parse().unwrap();
    assert!((tau - 1.0 / 6.0).abs() < 1e-12);
    let err: f64 = quiet(&["oracle", "--model", s(&e3), "--quiet"]).parse().unwrap();
    assert!(err < 1e-6);
    assert_eq!(quiet(&["extrinsic", "--model", s(&e3), "--n", "2", "--R", "2", "--quiet"]), "Pass\nParabolic");
}

#[test]
fn extrinsic_profile_mode() {
    let dir = TempDir::new().unwrap();
    // Minimal 3-dimensional submanifold of flat space with h = 0.
    let p = scenario(
        &dir,
        "minimal.json",
        r#"{"comparison": {"w": "r"},
            "submanifold": {"n": 3, "psi": "0", "rho": 1, "sense": "at-least"},
            "action": {"command": "extrinsic"}}"#,
    );
    let o = wgeom(&["run", "--scenario", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: Hyperbolic") && out.contains("guaranteed: true"), "{out}");
}
