use std::{
    fs,
    path::Path,
    process::{Command, Output},
};

use quenchfront::{csvio, Table};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quenchfront"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_at_zero_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c0.csv");
    let r = run(&["solve", "--c", "0", "--spectrum", "--out", path_str(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = Table::read(&out).unwrap();
    assert_eq!(t.kind, "profile");
    assert_eq!(t.columns, ["x", "u", "residual"]);
    assert!(t.get_f64("residual_norm").unwrap() <= 1e-10);
    assert!(t.get_f64("lambda0").unwrap() < 0.0);
    for key in ["c", "h", "domain", "alpha_plus", "alpha_minus", "x_delta", "crossings"] {
        assert!(t.get(key).is_some(), "missing {key}");
    }
    let p = csvio::read_profile(&out).unwrap();
    assert!((p.u_at_zero().unwrap() - 0.519).abs() < 1e-3);
}

#[test]
fn small_domain_reports_margin_error() {
    let r = run(&["solve", "--c", "0", "--xmax", "2"]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    let line = err.lines().last().unwrap();
    assert!(line.starts_with("error: kind=DomainViolation"), "{line}");
    assert!(line.contains("margin"), "{line}");
}

#[test]
fn strongly_negative_drift_matches_amplitude_formula() {
    let r = run(&["solve", "--c=-200"]);
    assert!(r.status.success());
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    let u0 = t.get_f64("u_at_zero").unwrap();
    assert!((u0 / 2.8247 - 1.0).abs() < 0.02, "u(0) = {u0}");
}

#[test]
fn header_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let r = run(&["solve", "--c", "1.5", "--h", "0.02", "--tol", "1e-11", "--out", path_str(&first)]);
    assert!(r.status.success());
    let second = dir.path().join("second.csv");
    let r = run(&["solve", "--config", path_str(&first), "--out", path_str(&second)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let a = Table::read(&first).unwrap();
    let b = Table::read(&second).unwrap();
    assert_eq!(b.get("config.h"), Some("0.02"));
    assert_eq!(a.rows.len(), b.rows.len());
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "c = 3\nh = 0.02\n").unwrap();
    let r = run(&["solve", "--config", path_str(&cfg), "--c", "1"]);
    assert!(r.status.success());
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    assert_eq!(t.get_f64("c").unwrap(), 1.0);
    assert_eq!(t.get("config.h"), Some("0.02"));
}

#[test]
fn unknown_schema_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.csv");
    fs::write(&seed, "# schema_version = 99\n# kind = profile\n# c = 0\nx,u\n0,1\n").unwrap();
    let r = run(&["solve", "--c", "0.5", "--seed-file", path_str(&seed)]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("schema"));
}

#[test]
fn seed_file_start_converges() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.csv");
    assert!(run(&["solve", "--c", "2", "--out", path_str(&seed)]).status.success());
    let r = run(&["solve", "--c", "2.5", "--seed-file", path_str(&seed)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn branch_rows_and_monotone_columns() {
    let r = run(&["branch", "--cmin=-2", "--cmax", "2", "--dc", "0.5"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    assert_eq!(
        t.columns,
        ["c", "u_at_zero", "x_delta", "crossing_count", "lambda0", "alpha_plus"]
    );
    let c = t.column("c").unwrap();
    let u0 = t.column("u_at_zero").unwrap();
    let xd = t.column("x_delta").unwrap();
    assert!(c.first().unwrap() <= &-2.0 && c.last().unwrap() >= &2.0);
    for i in 1..c.len() {
        assert!(c[i] > c[i - 1] && u0[i] < u0[i - 1] && xd[i] < xd[i - 1]);
    }
    for (ci, n) in c.iter().zip(t.column("crossing_count").unwrap()) {
        if *ci >= 0.0 {
            assert_eq!(n, 1.0);
        }
    }
}

#[test]
fn compare_tanh_writes_overlay() {
    let r = run(&["compare-tanh", "--eps", "1e-3", "--c", "0"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    assert_eq!(t.columns, ["x", "u_tanh", "u_inner_scaled", "gap"]);
    assert!(t.get_f64("sup_gap").unwrap() < 0.05 * 0.1);
    assert!(t.get_f64("interface_gap").unwrap() < 0.5);
}

#[test]
fn spectrum_and_evolve_commands() {
    let r = run(&["spectrum", "--c", "1", "--k", "3"]);
    assert!(r.status.success());
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    let l: Vec<f64> = (0..3).map(|j| t.get_f64(&format!("eigenvalue.{j}")).unwrap()).collect();
    assert!(l[0] < 0.0 && l[1] < l[0] && l[2] < l[1]);

    let r = run(&["evolve", "--c", "0", "--t-end", "40", "--scheme", "imex-cn"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = Table::read_from(r.stdout.as_slice()).unwrap();
    let ratio = t.get_f64("rate_ratio").unwrap();
    assert!((ratio - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn unknown_scheme_is_rejected() {
    let r = run(&["evolve", "--c", "0", "--scheme", "rk4"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).starts_with("error: kind="));
}
