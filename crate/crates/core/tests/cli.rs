use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cdqse::table::Table;

fn cdqse(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdqse"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn table(path: &Path) -> Table {
    Table::from_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn design_single_i_has_no_two_photon_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdqse(
        &[
            "design",
            "--protocol",
            "single-I",
            "--nu",
            "0.70710678",
            "--T",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = table(&dir.path().join("pulses.csv"));
    assert_eq!(&t.header[..4], ["t", "omega_p", "omega_s", "omega_a"]);
    assert!(t.column("omega_p").unwrap().iter().all(|&x| x == 0.0));
    assert!(t.column("omega_s").unwrap().iter().all(|&x| x == 0.0));
    assert!(t.column("omega_a").unwrap().iter().any(|&x| x != 0.0));
    let d = json(&dir.path().join("design.json"));
    for key in [
        "theta0", "theta_f", "phi0", "phi_f", "zeta", "chi", "branch",
    ] {
        assert!(d["boundary"].get(key).is_some(), "{key}");
    }
}

#[test]
fn design_multi_writes_the_equal_superposition_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "design",
        "--protocol",
        "multi",
        "--mu",
        "0.5774",
        "--eta",
        "0.5774",
        "--nu",
        "0.5774",
        "--T",
        "1",
    ];
    assert_eq!(cdqse(&args, dir.path()).status.code(), Some(0));
    let t = table(&dir.path().join("pulses.csv"));
    assert!(t.column("omega_a").unwrap().iter().all(|&x| x == 0.0));
    let d = json(&dir.path().join("design.json"));
    assert!((d["boundary"]["zeta"].as_f64().unwrap() - 1.7837).abs() < 1e-3);
}

#[test]
fn invalid_normalization_exits_2_with_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdqse(
        &[
            "design",
            "--protocol",
            "multi",
            "--mu",
            "0.9",
            "--eta",
            "0.9",
            "--nu",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("not normalized") && err.contains("6.3"),
        "{err}"
    );
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn usage_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        cdqse(&["design", "--bogus"], dir.path()).status.code(),
        Some(4)
    );
    assert_eq!(
        cdqse(&["design", "--protocol", "nope", "--nu", "1"], dir.path())
            .status
            .code(),
        Some(4)
    );
    assert_eq!(cdqse(&["figures", "14"], dir.path()).status.code(), Some(4));
}

#[test]
fn evolve_population_inversion() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        cdqse(
            &["evolve", "--protocol", "single-I", "--nu", "1"],
            dir.path()
        )
        .status
        .code(),
        Some(0)
    );
    let s = json(&dir.path().join("summary.json"));
    assert!(s["final_populations"][2].as_f64().unwrap() >= 0.999);
    assert!(s["max_norm_drift"].as_f64().unwrap() < 1e-8);
    let t = table(&dir.path().join("trajectory.csv"));
    let expect = [
        "t", "P1", "P2", "P3", "re_a1", "im_a1", "re_a2", "im_a2", "re_a3", "im_a3", "norm",
    ];
    assert_eq!(&t.header[..expect.len()], expect);
    assert_eq!(t.rows.len(), 4001);
}

#[test]
fn evolve_no_microwave_split() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--protocol",
        "single-II-nomw",
        "--mu",
        "0.40824829",
        "--eta",
        "0.57735027",
        "--nu",
        "0.70710678",
    ];
    assert_eq!(cdqse(&args, dir.path()).status.code(), Some(0));
    let s = json(&dir.path().join("summary.json"));
    let p: Vec<f64> = s["final_populations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (got, want) in p.iter().zip([0.1667, 0.3333, 0.5]) {
        assert!((got - want).abs() < 1e-3);
    }
}

#[test]
fn evolve_phased_adds_readback_columns() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--protocol",
        "phased",
        "--mu",
        "0.70710678",
        "--nu",
        "0.70710678",
        "--lambda",
        "0.5",
        "--format",
        "csv",
    ];
    assert_eq!(cdqse(&args, dir.path()).status.code(), Some(0));
    let t = table(&dir.path().join("trajectory.csv"));
    for col in [
        "theta_prime",
        "kappa_prime",
        "bloch_x",
        "bloch_y",
        "bloch_z",
    ] {
        assert!(t.column(col).is_some(), "{col}");
    }
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn sweep_grid_and_determinism() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(
            cdqse(
                &["sweep", "--resolution", "50", "--format", "csv"],
                dir.path()
            )
            .status
            .code(),
            Some(0)
        );
    }
    let text = fs::read(a.path().join("ratio_surface.csv")).unwrap();
    assert_eq!(text, fs::read(b.path().join("ratio_surface.csv")).unwrap());
    let t = table(&a.path().join("ratio_surface.csv"));
    assert_eq!(t.header, ["mu", "eta", "omega_ratio", "energy_ratio"]);
    assert_eq!(t.rows.len(), 2500);
    let row = t
        .rows
        .iter()
        .find(|r| (r[0] - 0.5).abs() < 0.011 && r[1] == 0.0)
        .unwrap();
    assert!((row[2] - 0.5).abs() < 1e-12);
    assert!(
        cdqse(&["sweep", "--resolution", "5"], a.path())
            .status
            .code()
            == Some(2)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(
        &cfg,
        "protocol = single-II\nmu = 0\neta = 0.70710678\nnu = 0.70710678\nT = 5\n",
    )
    .unwrap();
    let out = cdqse(
        &["design", "--config", cfg.to_str().unwrap(), "--T", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("design.json"))["T"], 2.0);
}

#[test]
fn metrics_reports_the_mode_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdqse(
        &[
            "metrics",
            "--protocol",
            "multi",
            "--mu",
            "0.6",
            "--nu",
            "0.8",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let m = json(&dir.path().join("metrics.json"));
    assert!((m["mode_ratio"]["omega_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((m["omega_bar"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn figure_file_sets() {
    let dir = tempfile::tempdir().unwrap();
    let run = |n: &str| {
        cdqse(&["figures", n, "--steps", "400"], dir.path())
            .status
            .code()
    };
    assert_eq!(run("5"), Some(0));
    assert!(
        dir.path().join("fig05a_trajectory.csv").exists()
            && dir.path().join("fig05b_trajectory.csv").exists()
    );
    assert_eq!(run("3"), Some(0));
    for panel in ['a', 'b', 'c', 'd'] {
        assert!(dir
            .path()
            .join(format!("fig03{panel}_trajectory.csv"))
            .exists());
    }
    assert_eq!(run("13"), Some(0));
    let t = table(&dir.path().join("fig13_trajectory.csv"));
    let last = t.rows.last().unwrap();
    assert!((last[1] - 0.5).abs() < 1e-6 && (last[3] - 0.5).abs() < 1e-6);
}
