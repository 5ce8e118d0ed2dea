//! End-to-end checks of the command-line binary: output formats, exit
//! codes, and byte-level determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pharmonic"))
}

#[test]
fn phase_identity_is_homeomorphic() {
    let out = bin()
        .args(["phase", "--p", "1.5", "--r", "0.5", "--rstar", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["regime"], "Homeomorphic");
    assert_eq!(doc["seed"], 0);
}

#[test]
fn phase_thin_target_on_punctured_disk_collapses() {
    let out = bin()
        .args(["phase", "--p", "1.5", "--r", "0", "--rstar", "0.2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["regime"], "Collapsed");
    assert_eq!(doc["report"]["m_value"], "inf");
}

#[test]
fn phase_p1_thick_target_has_no_minimizer() {
    let out = bin()
        .args(["phase", "--p", "1", "--r", "0.3", "--rstar", "0.001"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["regime"], "NoMinimizer");
}

#[test]
fn invalid_instance_exits_2() {
    let out = bin()
        .args(["phase", "--p", "1.5", "--r", "2", "--rstar", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn modulus_column_is_monotone_and_starts_at_one() {
    let out = bin()
        .args(["modulus", "--p", "1.5", "--xmin", "1", "--xmax", "50", "--n", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,m_p"));
    let vals: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((vals[0] - 1.0).abs() < 1e-9);
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn profile_identity_column_equals_s() {
    let out = bin()
        .args(["profile", "--p", "1.5", "--r", "0.4", "--rstar", "0.4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,H0,g,rho1,rho2"));
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[1] - f[0]).abs() < 1e-12, "H0 != s on {line}");
        assert!((f[2] - 0.5).abs() < 1e-12, "g != 1/2 on {line}");
    }
}

#[test]
fn profile_collapsed_shows_plateau_then_rise() {
    let out = bin()
        .args(["profile", "--p", "1.4", "--r", "0.1", "--rstar", "0.7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.first().unwrap()[1], 0.7);
    assert!(rows.iter().any(|f| f[1] == 0.7 && f[0] > 0.11), "plateau");
    assert!((rows.last().unwrap()[1] - 1.0).abs() < 1e-9, "rises to 1");
}

#[test]
fn sweep_diagonal_is_homeomorphic() {
    let out = bin()
        .args(["sweep", "--p", "1.5", "--nx", "5", "--ny", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let mut it = line.split(',');
        let x: f64 = it.next().unwrap().parse().unwrap();
        let y: f64 = it.next().unwrap().parse().unwrap();
        let regime = it.next().unwrap();
        if (x - y).abs() < 1e-12 {
            assert_eq!(regime, "Homeomorphic", "diagonal at ratio {x}");
        }
    }
}

#[test]
fn verify_counterexample_passes_with_eps_flag() {
    let out = bin()
        .args(["verify", "counterexample", "--eps", "0.01"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["passed"], true);
    let names: Vec<&str> = doc["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"e1_below_identity_eps_0.01"));
}

#[test]
fn unknown_suite_exits_2() {
    let out = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let args = [
        "counterexample-sample",
        "--eps",
        "0.05",
        "--ns",
        "10",
        "--ntheta",
        "16",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.ends_with(b"\n"));
    assert!(!String::from_utf8(a.stdout).unwrap().contains('\r'));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join("pharmonic_cli_modulus_test.csv");
    let out = bin()
        .args([
            "modulus", "--p", "1.2", "--n", "5", "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,m_p\n"));
    std::fs::remove_file(&path).ok();
}
