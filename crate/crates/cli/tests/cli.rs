use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str], config: Option<&str>, dir: &TempDir) -> (Output, PathBuf) {
    let out = dir.path().join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_overdet"));
    cmd.args(args).arg("--out").arg(&out);
    if let Some(text) = config {
        let path = dir.path().join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(&path);
    }
    (cmd.output().unwrap(), out)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

const BERNOULLI: &str = r#"{"problem": {"kind": "bernoulli", "dim": 2, "inner_radius": 0.5},
    "discretization": {"m": 128, "cutoff": 32}, "solve": {"cutoff": 4}}"#;

fn with(extra: &str) -> String {
    format!(
        r#"{{"problem": {{"kind": "bernoulli", "dim": 2, "inner_radius": 0.5}},
            "discretization": {{"m": 128, "cutoff": 32}}, "solve": {{"cutoff": 32}}{extra}}}"#
    )
}

#[test]
fn multipliers_table_bernoulli() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&["multipliers"], Some(BERNOULLI), &dir);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(&out.join("multipliers.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,m_f,m_g"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] + 3.847186775703902).abs() < 1e-12);
    assert!((row[2] - 3.847186775703902).abs() < 1e-12);
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn multipliers_table_two_phase() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"problem": {"kind": "two_phase", "sigma_c": 2.0, "dim": 2, "inner_radius": 0.5},
        "discretization": {"m": 64, "cutoff": 2}, "solve": {"cutoff": 2}}"#;
    let (o, out) = run(&["multipliers"], Some(cfg), &dir);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(&out.join("multipliers.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,m_f,m_g,F,s_k");
    let row: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[1] + 1.0 / 11.0).abs() < 1e-15);
    assert!((row[2] - 1.0 / 11.0).abs() < 1e-15);
    assert_eq!(row[3], 22.0);
    assert_eq!(row[4], 1.0);
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&["verify-linearization"], Some("{\"problem\": {\"kind\": \"bernoulli\",\n \"dim\": 2,}"), &dir);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert!(!out.exists());
}

#[test]
fn invalid_values_exit_2() {
    let dir = TempDir::new().unwrap();
    for cfg in [
        r#"{"problem": {"kind": "bernoulli", "dim": 2, "inner_radius": 1.5}}"#.to_string(),
        with(r#", "perturbation": {"type": "tent_notch", "depth": 0.4, "center": 0.0}"#),
        with(r#", "verify": {"t_list": [0.01, 0.02]}"#),
        r#"{"problem": {"kind": "bernoulli", "dim": 3, "inner_radius": 0.5}}"#.to_string(),
    ] {
        let (o, _) = run(&["solve"], Some(&cfg), &dir);
        assert_eq!(o.status.code(), Some(2), "{cfg}");
    }
    let (o, _) = run(&["solve"], None, &dir);
    assert_eq!(o.status.code(), Some(2));
    let (o, _) = run(&["no-such-command"], Some(BERNOULLI), &dir);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trivial_solve_report() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&["solve", "--seed", "7"], Some(&with("")), &dir);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&read(&out.join("solve.json"))).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["report"]["iterations"], 1);
    assert_eq!(doc["report"]["converged"], true);
    assert_eq!(doc["config"]["problem"]["kind"], "bernoulli");
    assert!(read(&out.join("residual_history.csv")).starts_with("iteration,residual,coeff_residual\n"));
}

#[test]
fn outputs_are_deterministic() {
    let cfg = with(r#", "perturbation": {"type": "fourier_mode", "k": 2, "amplitude": 0.03}"#);
    let mut docs = Vec::new();
    for _ in 0..2 {
        let dir = TempDir::new().unwrap();
        let (o, out) = run(&["solve", "--workers", "2"], Some(&cfg), &dir);
        assert_eq!(o.status.code(), Some(0));
        docs.push((read(&out.join("solve.json")), read(&out.join("g_final.csv"))));
    }
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn verify_linearization_library_reference_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = with(r#", "verify": {"modes": [{"side": "outer", "k": 1}, {"side": "inner", "k": 2}, {"side": "inner", "k": 3, "parity": "sin"}]}"#);
    let (o, out) = run(&["verify-linearization"], Some(&cfg), &dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = read(&out.join("linearization.csv"));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")));
    assert_eq!(read(&out.join("linearization_convergence.csv")).lines().count(), 10);
}

#[test]
fn verify_linearization_outer_flux_reference_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = with(r#", "verify": {"modes": [{"side": "inner", "k": 1}], "inner_reference": "outer_flux"}"#);
    let (o, out) = run(&["verify-linearization"], Some(&cfg), &dir);
    assert_eq!(o.status.code(), Some(1));
    assert!(read(&out.join("linearization.csv")).contains(",false,"));
}

#[test]
fn asymptotics_ratios_decrease() {
    let dir = TempDir::new().unwrap();
    let cfg = with(r#", "perturbation": {"type": "fourier_mode", "k": 1, "amplitude": 1.0}"#);
    let (o, out) = run(&["asymptotics"], Some(&cfg), &dir);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&read(&out.join("asymptotics.json"))).unwrap();
    assert_eq!(doc["monotone"], true);
    assert!(doc["reduction"].as_f64().unwrap() <= 0.5);
}

#[test]
fn symmetry_of_even_perturbation() {
    let dir = TempDir::new().unwrap();
    let cfg = with(r#", "perturbation": {"type": "coefficients", "cos": [0.0, 0.05, 0.0, 0.015]}"#);
    let (o, out) = run(&["symmetry"], Some(&cfg), &dir);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&read(&out.join("symmetry.json"))).unwrap();
    assert!(doc["asymmetry"].as_f64().unwrap() <= 1e-8);
    let odd = with(r#", "perturbation": {"type": "coefficients", "sin": [0.0, 0.05]}"#);
    let (o, _) = run(&["symmetry"], Some(&odd), &dir);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sigma_table_lists_resonances() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"problem": {"kind": "two_phase", "sigma_c": 0.5, "dim": 2, "inner_radius": 0.9},
        "discretization": {"m": 64, "cutoff": 16}, "solve": {"cutoff": 16, "singular_guard_tol": 1e-6},
        "sigma_table": {"sigma_values": [0.3262137, 0.5]}}"#;
    let (o, out) = run(&["sigma-table"], Some(cfg), &dir);
    assert_eq!(o.status.code(), Some(0));
    let table = read(&out.join("sigma_table.csv"));
    assert!(table.lines().nth(1).unwrap().starts_with("0.9,1,1"));
    let sweep = read(&out.join("sigma_sweep.csv"));
    let first: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[1], "2");
    assert_eq!(first[4], "true");
}

#[test]
fn counterexample_reports_convex_outer() {
    let dir = TempDir::new().unwrap();
    let cfg = with(
        r#", "perturbation": {"type": "tent_notch", "depth": 0.05, "center": 1.5707963267948966},
           "counterexample": {"t_max": 1.0, "steps": 2}"#,
    );
    let (o, out) = run(&["counterexample"], Some(&cfg), &dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&read(&out.join("counterexample.json"))).unwrap();
    assert_eq!(doc["success"], true);
    assert_eq!(doc["threshold"]["run"]["curvature"]["inner_convex"], false);
    assert!(doc["control"]["max_curvature_error"].as_f64().unwrap() <= 1e-12);
    assert!(read(&out.join("curvature.csv")).starts_with("theta,curvature\n"));
    let (o, _) = run(&["counterexample"], Some(&with("")), &dir);
    assert_eq!(o.status.code(), Some(2));
}
