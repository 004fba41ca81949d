use std::fs;
use std::process::{Command, Output};

use eamchain::{coefficients, make_toy_potentials, ToyFamilyParams64};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eamchain")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_passes_at_reference_strain() {
    let out = run(&["check", "--alpha", "4", "--beta", "3", "--c", "1", "--F", "1.0", "--N", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["all_pass"], true);
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn check_fails_when_sign_assumptions_fail() {
    let out = run(&["check", "--F", "1.3", "--N", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["all_pass"], false);
}

#[test]
fn volume_spectrum_is_flat() {
    let out = run(&["spectrum", "--model", "volume", "--N", "8", "--F", "1.0"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let numeric = doc["numeric"].as_array().unwrap();
    assert_eq!(numeric.len(), 15);
    let a = coefficients(&make_toy_potentials(ToyFamilyParams64::default()).unwrap(), 1.0).unwrap().a;
    for v in numeric {
        assert!((v.as_f64().unwrap() - a).abs() <= 1e-9 * (1.0 + a.abs()));
    }
}

#[test]
fn sweep_grid_has_steps_plus_one_rows() {
    let out = run(&["sweep", "--F-min", "0.9", "--F-max", "1.4", "--steps", "50"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "F,lam_a,lam_cv,lam_cr,stable_a,stable_cv,stable_cr,B_sign,kappa_sign");
    assert_eq!(lines.count(), 51);
}

#[test]
fn critical_reports_every_requested_model() {
    let out = run(&["critical", "--model", "atomistic,recon", "--F-min", "1.0", "--F-max", "1.5", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = doc.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let f: Vec<f64> = reports.iter().map(|r| r["F_crit"].as_f64().unwrap()).collect();
    assert!(f[1] < f[0], "reconstruction model should fail first: {f:?}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for p in &paths {
        let out = run(&["sweep", "--steps", "30", "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn help_lists_flags_with_defaults() {
    let expected: [(&str, &[&str]); 5] = [
        ("spectrum", &["--model", "--N", "--F", "--format", "--output"]),
        ("sweep", &["--N", "--F-min", "--F-max", "--steps", "--mode", "--format"]),
        ("critical", &["--model", "--N", "--F-min", "--F-max", "--tol", "--mode"]),
        ("check", &["--N", "--F", "--output"]),
        ("solve", &["--model", "--N", "--F", "--loads", "--tol", "--max-iter"]),
    ];
    for (cmd, flags) in expected {
        let text = stdout(&run(&[cmd, "--help"]));
        for flag in flags.iter().chain(&["--config", "--alpha", "--beta", "--c", "--rho-floor"]) {
            assert!(text.contains(flag), "{cmd} help misses {flag}");
        }
        assert!(text.matches("[default:").count() >= flags.len(), "{cmd} help lacks defaults");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--N", "0"]).status.code(), Some(2));
    assert_eq!(run(&["critical", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--alpha", "-2"]).status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("toy.cfg");
    fs::write(&cfg, "# toy family\nalpha = 4\nbeta = 6\nc = 10\n").unwrap();
    let doc = |extra: &[&str]| -> serde_json::Value {
        let mut args = vec!["check", "--F", "1.1", "--N", "8", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        serde_json::from_str(&stdout(&run(&args))).unwrap()
    };
    assert_eq!(doc(&[])["params"]["beta"], 6.0);
    assert_eq!(doc(&["--beta", "5"])["params"]["beta"], 5.0);
}

#[test]
fn solve_converges_under_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let loads = dir.path().join("loads.txt");
    let n = 8;
    let values: String = (0..2 * n)
        .map(|i| {
            let label = i as f64 - n as f64 + 1.0;
            format!("{:.17e}\n", 0.5 * (std::f64::consts::PI * label / n as f64).sin())
        })
        .collect();
    fs::write(&loads, values).unwrap();
    let out = run(&["solve", "--N", "8", "--F", "1.0", "--loads", loads.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["residuals"].as_array().unwrap().last().unwrap().as_f64().unwrap() <= 1e-10);
    assert_eq!(doc["positions"].as_array().unwrap().len(), 16);
}

#[test]
fn solve_past_critical_strain_fails() {
    let dir = tempfile::tempdir().unwrap();
    let loads = dir.path().join("loads.txt");
    fs::write(&loads, (0..16).map(|i| format!("{}\n", if i % 2 == 0 { 0.1 } else { -0.1 })).collect::<String>())
        .unwrap();
    let out = run(&["solve", "--N", "8", "--F", "1.4", "--loads", loads.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
